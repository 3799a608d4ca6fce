#pragma once

#include "sbs/types.hpp"

namespace sbs {

struct StepwiseFit {
  IndexSet support;              // in order of addition
  double intercept = 0.0;
  VectorXd beta;                 // length P, zero off support
  std::vector<double> rss_path;  // [0] is the intercept-only model
  std::vector<double> aic_path;
};

/// Forward stepwise selection from the intercept-only model, adding the
/// predictor that most reduces the RSS while the Gaussian AIC
/// T log(RSS/T) + 2(q+1) keeps improving.
StepwiseFit forward_stepwise(const MatrixXd& X, const VectorXd& y);

struct SvsSolution {
  MatrixXd betas;              // M x P
  double t_value = 0.0;
  IndexSet active_set;         // columns with |beta_p|_inf > t * e^-4
  MatrixXd thresholded_betas;  // betas with inactive columns zeroed
  double objective = 0.0;      // sum of model RSS at betas
  double kkt_residual = 0.0;
};

/// Simultaneous variable selection: min sum_m RSS_m subject to
/// sum_p max_m |beta_{m,p}| <= t (and beta >= 0 when nonneg). Solved in
/// penalized form by accelerated proximal gradient, with the penalty weight
/// matched to t by bisection.
SvsSolution svs_m_solve(const PanelDataset& data, double t, bool nonneg = false);

/// Solves on n_t equally spaced t values in [0, t_max], where t_max is the
/// total absolute size of the unconstrained coefficients.
std::vector<SvsSolution> svs_m_path(const PanelDataset& data, int n_t,
                                    bool nonneg = false);

}  // namespace sbs
