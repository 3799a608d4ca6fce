#pragma once

#include "sbs/types.hpp"

#include <string>
#include <vector>

namespace sbs {

/// Seasonal ARIMA order (p,d,q)(P,D,Q)_s.
struct SarimaOrder {
  int p = 0, d = 0, q = 0;
  int P = 0, D = 0, Q = 0;
  int s = 1;

  int n_params() const { return p + q + P + Q; }
  int ar_span() const { return p + P * s; }
  int ma_span() const { return q + Q * s; }
  int diff_span() const { return d + D * s; }

  bool operator==(const SarimaOrder&) const = default;

  std::string str() const;
  /// Parses "(p,d,q)" or "(p,d,q)(P,D,Q)" or "(p,d,q)(P,D,Q,s)".
  static SarimaOrder parse(const std::string& text);
};

struct SarimaFit {
  SarimaOrder order;
  VectorXd phi;    // p
  VectorXd theta;  // q
  VectorXd Phi;    // P
  VectorXd Theta;  // Q
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;

  /// Coefficients of the expanded AR operator phi(L)Phi(L^s), length p + P*s,
  /// in the recursion convention w_t = sum_i ar[i] w_{t-1-i} + ...
  VectorXd ar_poly() const;
  /// Coefficients of the expanded MA operator theta(L)Theta(L^s), length
  /// q + Q*s, convention ... + e_t + sum_j ma[j] e_{t-1-j}.
  VectorXd ma_poly() const;
};

/// Applies (1-L)^d (1-L^s)^D; output length shrinks by d + D*s.
VectorXd seasonal_difference(const VectorXd& series, int d, int D, int s);

/// Gaussian conditional-sum-of-squares log-likelihood with zero pre-sample
/// innovations; the first p + P*s innovations of the differenced series are
/// discarded. `params` is packed [phi, theta, Phi, Theta].
double css_loglik(const VectorXd& series, const SarimaOrder& order,
                  const VectorXd& params);

/// The retained innovations behind css_loglik (length T_eff).
VectorXd css_innovations(const VectorXd& series, const SarimaOrder& order,
                         const VectorXd& params);

/// CSS estimation: Nelder-Mead on partial-autocorrelation-transformed
/// parameters from method-of-moments starts, with jittered restarts.
SarimaFit fit_sarima(const VectorXd& series, const SarimaOrder& order);

enum class Criterion { AIC, BIC };

/// Fits every candidate and returns the best by the criterion; ties go to
/// fewer parameters, then earlier list position. Candidates that fail to fit
/// are skipped.
SarimaFit select_sarima(const VectorXd& series, const std::vector<SarimaOrder>& candidates,
                        Criterion criterion = Criterion::BIC);

/// Applies the whitening operator of `fit` (difference, AR convolution, MA
/// inversion with zero pre-sample values); output length shrinks by
/// d + D*s + p + P*s, identically for any series of this length.
VectorXd whiten(const VectorXd& series, const SarimaFit& fit);

/// Whitens response m and every predictor column of model m with fits[m],
/// then trims all models to a common length so the panel stays rectangular.
PanelDataset filter_panel(const PanelDataset& data, const std::vector<SarimaFit>& fits);

struct AcfPacf {
  VectorXd acf;   // lags 0..max_lag, acf[0] = 1
  VectorXd pacf;  // lags 1..max_lag
};

/// Sample autocorrelations and Durbin-Levinson partial autocorrelations.
AcfPacf acf_pacf(const VectorXd& series, int max_lag);

/// Standard errors of [phi, theta, Phi, Theta] from the numerical observed
/// information of the CSS log-likelihood at the fitted parameters.
VectorXd param_std_errors(const VectorXd& series, const SarimaFit& fit);

}  // namespace sbs
