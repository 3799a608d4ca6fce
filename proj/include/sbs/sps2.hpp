#pragma once

#include "sbs/miqo.hpp"
#include "sbs/sarima.hpp"
#include "sbs/types.hpp"

namespace sbs {

struct Sps2Config {
  std::vector<int> k_range;                // one or more sparsity levels
  std::vector<SarimaOrder> candidate_orders;
  int maxiter = 10;
  double beta_tol = 1e-3;
  Criterion criterion = Criterion::BIC;
  ConstraintSet constraints;
};

struct Sps2Iteration {
  std::vector<std::uint8_t> support;
  MatrixXd betas;                     // M x P
  std::vector<SarimaOrder> orders;    // empty on the raw (first) pass
  double objective = 0.0;
};

struct Sps2Result {
  int k = 0;
  std::vector<Sps2Iteration> iterations;
  bool converged = false;
  int iterations_used = 0;
  SbsSolution final_solution;
  std::vector<SarimaFit> final_fits;
};

/// True iff supports match, SARIMA order lists match, and no coefficient
/// moved by beta_tol or more.
bool has_converged(const Sps2Iteration& prev, const Sps2Iteration& curr,
                   double beta_tol);

/// One run of the two-step procedure at sparsity k: solve the subset problem,
/// model the residual serial correlation, re-solve on GLS-filtered data,
/// iterate until stable. Residuals are always taken on the original panel.
Sps2Result run_sps2_single(const PanelDataset& data, const Sps2Config& cfg, int k);

/// Runs every k in cfg.k_range independently (ascending order).
std::vector<Sps2Result> run_sps2(const PanelDataset& data, const Sps2Config& cfg);

}  // namespace sbs
