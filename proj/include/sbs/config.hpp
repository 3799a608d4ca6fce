#pragma once

#include "sbs/sarima.hpp"
#include "sbs/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sbs {

#define SBS_DEFINE_ERROR(name)                                                 \
  class name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

SBS_DEFINE_ERROR(ParseError);
SBS_DEFINE_ERROR(UnknownKey);
SBS_DEFINE_ERROR(MissingRequired);
SBS_DEFINE_ERROR(UnknownExperiment);

#undef SBS_DEFINE_ERROR

/// Parsed key=value configuration for the fitting pipeline. Grammar is
/// documented in the README; unknown sections or keys are fatal.
struct RunConfig {
  // [data]
  std::vector<std::string> files;       // one CSV per response
  std::string response_column;
  std::string date_column;              // optional
  std::vector<std::string> predictor_columns;  // optional explicit subset

  // [constraints]
  std::vector<int> k_range = {1, 2, 3, 4, 5};
  std::vector<std::string> must_include;
  std::vector<std::string> positive;    // may be the single entry "all"
  std::vector<std::string> negative;
  std::optional<double> rho;
  double lambda = 0.0;
  bool equality = false;
  std::optional<double> time_limit;

  // [transform]
  struct Smooth {
    std::string base;
    std::vector<double> alphas;
  };
  std::vector<Smooth> smooths;

  // [sarima]
  std::vector<SarimaOrder> candidates;
  Criterion criterion = Criterion::BIC;
  int maxiter = 10;
  double beta_tol = 1e-3;

  // [run]
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int lambda_n = 10;
  int acf_lags = 35;
};

RunConfig parse_config(const std::string& path);

/// The panel read from the configured CSVs with smoothing expansions applied,
/// plus the fully resolved constraint set and any preserved date strings.
struct LoadedPanel {
  PanelDataset data;
  ConstraintSet constraints;
  std::vector<std::string> dates;
};

LoadedPanel load_panel(const RunConfig& cfg);

}  // namespace sbs
