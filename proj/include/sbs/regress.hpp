#pragma once

#include "sbs/types.hpp"

namespace sbs {

/// Per-predictor sign requirements, aligned with a ConstraintSet's sign sets.
struct SignMap {
  std::vector<Sign> signs;

  static SignMap free_map(int P) { return SignMap{std::vector<Sign>(P, Sign::Free)}; }
  static SignMap from_constraints(const ConstraintSet& cs, int P);

  Sign operator[](int p) const { return signs[p]; }
  int size() const { return static_cast<int>(signs.size()); }
};

struct LsFit {
  VectorXd beta;
  double rss = 0.0;
};

/// Ordinary least squares, minimum-norm under rank deficiency. q = 0 is
/// allowed and returns rss = |y|^2.
LsFit ols(const MatrixXd& X, const VectorXd& y);

/// Least squares under per-column sign requirements (active-set method,
/// exact KKT point).
LsFit sign_constrained_ls(const MatrixXd& X, const VectorXd& y, const SignMap& signs);

struct JointFit {
  MatrixXd betas;      // M x P, zero off support
  VectorXd consensus;  // length P
  double objective = 0.0;
};

/// min sum_m RSS_m + lambda sum_m sum_p (consensus_p - beta_{m,p})^2 with
/// coefficients restricted to `support` (0-based), consensus free, signs
/// enforced per predictor.
JointFit joint_penalized_ls(const PanelDataset& data, const IndexSet& support,
                            double lambda, const SignMap& signs);

}  // namespace sbs
