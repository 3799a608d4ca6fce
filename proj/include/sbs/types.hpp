#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Sorted, duplicate-free 0-based predictor indices.
using IndexSet = std::vector<int>;
/// Unordered predictor pair stored with first < second.
using IndexPair = std::pair<int, int>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define SBS_DEFINE_ERROR(name)                                                 \
  class name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

SBS_DEFINE_ERROR(DimensionMismatch);
SBS_DEFINE_ERROR(NonFiniteValue);
SBS_DEFINE_ERROR(DuplicateName);
SBS_DEFINE_ERROR(ZeroVariance);
SBS_DEFINE_ERROR(AlphaOutOfRange);
SBS_DEFINE_ERROR(SeriesTooShort);
SBS_DEFINE_ERROR(NonStationaryParams);
SBS_DEFINE_ERROR(NonInvertibleMA);
SBS_DEFINE_ERROR(OptimFailed);
SBS_DEFINE_ERROR(AllFitsFailed);
SBS_DEFINE_ERROR(NonPositiveObjective);
SBS_DEFINE_ERROR(ConstraintError);

#undef SBS_DEFINE_ERROR

/// A system of M regressions sharing predictor names: response m has its own
/// T-vector y_m and its own T x P realisation of the P predictors.
struct PanelDataset {
  std::vector<VectorXd> responses;
  std::vector<MatrixXd> predictors;
  std::vector<std::string> predictor_names;
  std::vector<std::string> response_names;

  int n_models() const { return static_cast<int>(responses.size()); }
  int n_obs() const { return responses.empty() ? 0 : static_cast<int>(responses[0].size()); }
  int n_predictors() const {
    return predictors.empty() ? 0 : static_cast<int>(predictors[0].cols());
  }
};

/// Everything that restricts which supports are admissible and how
/// coefficients are shrunk. Indices are 0-based.
struct ConstraintSet {
  int sparsity_k = 1;
  IndexSet must_include;             // J
  IndexSet positive_signs;           // coefficients forced >= 0
  IndexSet negative_signs;           // coefficients forced <= 0
  std::optional<double> corr_threshold;  // rho used to derive exclusion_pairs
  std::vector<IndexPair> exclusion_pairs;  // HC, each with first < second
  std::vector<IndexSet> groups;      // at most one member per group
  double shrink_lambda = 0.0;
  bool equality_sparsity = false;
  std::optional<double> time_limit;  // seconds

  // Filled by validate(): number of predictors the indices refer to, and a
  // reason string when must_include itself violates HC or a group cap.
  int n_predictors = 0;
  std::optional<std::string> infeasible_reason;

  /// Checks structural invariants against a panel with P predictors and
  /// flags must-include conflicts. Throws ConstraintError on malformed input.
  void validate(int P);
};

/// Per-coefficient sign requirement.
enum class Sign : std::uint8_t { Free, NonNegative, NonPositive };

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit };

std::string to_string(SolveStatus s);

/// Result of one simultaneous best-subset solve.
struct SbsSolution {
  std::vector<std::uint8_t> support;  // z, length P
  MatrixXd betas;                     // M x P, zero off support
  VectorXd consensus;                 // beta-bar, length P
  double objective = std::numeric_limits<double>::infinity();
  double best_bound = -std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::Infeasible;
  std::int64_t nodes = 0;

  IndexSet selected() const {
    IndexSet out;
    for (int p = 0; p < static_cast<int>(support.size()); ++p)
      if (support[p]) out.push_back(p);
    return out;
  }
  int n_selected() const { return static_cast<int>(selected().size()); }
};

}  // namespace sbs
