#include "sbs/baselines.hpp"

#include "sbs/gram.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sbs {

namespace {

double gaussian_aic(double rss, int T, int q) {
  return T * std::log(std::max(rss, 1e-300) / T) + 2.0 * (q + 1);
}

}  // namespace

StepwiseFit forward_stepwise(const MatrixXd& X, const VectorXd& y) {
  const int T = static_cast<int>(X.rows());
  const int P = static_cast<int>(X.cols());
  if (T != y.size()) throw DimensionMismatch("rows of X differ from length of y");

  // Augmented design [1 X]; column 0 is the intercept and is always kept.
  MatrixXd Xa(T, P + 1);
  Xa.col(0).setOnes();
  Xa.rightCols(P) = X;
  const auto g = gram::make(Xa, y);

  std::vector<int> cols = {0};
  VectorXd beta;
  double rss = gram::solve_subset(g, cols, beta);

  StepwiseFit fit;
  fit.beta = VectorXd::Zero(P);
  fit.rss_path.push_back(rss);
  fit.aic_path.push_back(gaussian_aic(rss, T, 0));
  std::vector<char> used(P, 0);

  for (int step = 0; step < P; ++step) {
    int best_p = -1;
    double best_rss = std::numeric_limits<double>::infinity();
    VectorXd best_beta;
    for (int p = 0; p < P; ++p) {
      if (used[p]) continue;
      auto trial = cols;
      trial.push_back(p + 1);
      VectorXd b;
      const double r = gram::solve_subset(g, trial, b);
      if (r < best_rss - 1e-15) {
        best_rss = r;
        best_p = p;
        best_beta = b;
      }
    }
    if (best_p < 0) break;
    const double aic = gaussian_aic(best_rss, T, static_cast<int>(cols.size()));
    if (aic >= fit.aic_path.back()) break;
    used[best_p] = 1;
    cols.push_back(best_p + 1);
    fit.support.push_back(best_p);
    fit.rss_path.push_back(best_rss);
    fit.aic_path.push_back(aic);
    beta = best_beta;
  }

  if (!fit.support.empty()) {
    fit.intercept = beta[0];
    for (size_t i = 0; i < fit.support.size(); ++i)
      fit.beta[fit.support[i]] = beta[static_cast<int>(i) + 1];
  } else {
    fit.intercept = y.mean();
  }
  return fit;
}

namespace {

// Euclidean projection of v onto the l1 ball of radius r (Duchi et al.).
VectorXd project_l1(const VectorXd& v, double r) {
  if (r <= 0.0) return VectorXd::Zero(v.size());
  if (v.cwiseAbs().sum() <= r) return v;
  VectorXd u = v.cwiseAbs();
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double trial = (cum - r) / (i + 1);
    if (trial >= (i + 1 < u.size() ? u[i + 1] : 0.0)) {
      theta = trial;
      break;
    }
  }
  return v.unaryExpr([theta](double x) {
    const double mag = std::abs(x) - theta;
    return mag > 0.0 ? (x > 0 ? mag : -mag) : 0.0;
  });
}

// prox of tau * |.|_inf (plus the nonnegative cone when nonneg).
VectorXd prox_linf(VectorXd v, double tau, bool nonneg) {
  if (nonneg) v = v.cwiseMax(0.0);
  return v - project_l1(v, tau);
}

struct SvsWork {
  std::vector<gram::Gram> grams;
  double lipschitz = 0.0;
  int M = 0, P = 0;

  explicit SvsWork(const PanelDataset& data)
      : M(data.n_models()), P(data.n_predictors()) {
    grams.reserve(M);
    for (int m = 0; m < M; ++m)
      grams.push_back(gram::make(data.predictors[m], data.responses[m]));
    for (const auto& g : grams) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.G);
      lipschitz = std::max(lipschitz, 2.0 * es.eigenvalues().maxCoeff());
    }
    if (!(lipschitz > 0.0)) lipschitz = 1.0;
  }

  double objective(const MatrixXd& B) const {
    double obj = 0.0;
    for (int m = 0; m < M; ++m) {
      const VectorXd b = B.row(m).transpose();
      obj += g_rss(m, b);
    }
    return obj;
  }

  double g_rss(int m, const VectorXd& b) const {
    return std::max(0.0, grams[m].yty - 2.0 * grams[m].c.dot(b) +
                             b.dot(grams[m].G * b));
  }

  MatrixXd gradient(const MatrixXd& B) const {
    MatrixXd grad(M, P);
    for (int m = 0; m < M; ++m)
      grad.row(m) = 2.0 * (grams[m].G * B.row(m).transpose() - grams[m].c).transpose();
    return grad;
  }

  MatrixXd prox(const MatrixXd& V, double tau_mu, bool nonneg) const {
    MatrixXd out(M, P);
    for (int p = 0; p < P; ++p)
      out.col(p) = prox_linf(V.col(p), tau_mu, nonneg);
    return out;
  }

  // FISTA on min f(B) + mu * sum_p |B col p|_inf (+ indicator when nonneg).
  // Returns the fixed-point residual of the final iterate.
  double fista(double mu, bool nonneg, MatrixXd& B, int max_iter = 20000) const {
    const double tau = 1.0 / lipschitz;
    MatrixXd x_prev = B, y = B;
    double t_acc = 1.0;
    double resid = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
      const MatrixXd x = prox(y - tau * gradient(y), tau * mu, nonneg);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
      y = x + ((t_acc - 1.0) / t_next) * (x - x_prev);
      t_acc = t_next;
      x_prev = x;
      B = x;
      if (it % 10 == 9) {
        resid = (B - prox(B - tau * gradient(B), tau * mu, nonneg))
                    .cwiseAbs()
                    .maxCoeff();
        if (resid <= 1e-9 * (1.0 + B.cwiseAbs().maxCoeff())) break;
      }
    }
    return resid;
  }

  double group_norm(const MatrixXd& B) const {
    double s = 0.0;
    for (int p = 0; p < P; ++p) s += B.col(p).cwiseAbs().maxCoeff();
    return s;
  }
};

SvsSolution finish_solution(const SvsWork& work, const MatrixXd& B, double t,
                            double kkt) {
  SvsSolution sol;
  sol.betas = B;
  sol.t_value = t;
  sol.kkt_residual = kkt;
  sol.objective = work.objective(B);
  const double cut = t * std::exp(-4.0);
  sol.thresholded_betas = B;
  for (int p = 0; p < work.P; ++p) {
    if (B.col(p).cwiseAbs().maxCoeff() > cut)
      sol.active_set.push_back(p);
    else
      sol.thresholded_betas.col(p).setZero();
  }
  return sol;
}

SvsSolution svs_solve_impl(const SvsWork& work, double t, bool nonneg, MatrixXd* warm) {
  const int M = work.M, P = work.P;
  if (t < 0.0) throw ConstraintError("the SVS budget t must be >= 0");

  if (t == 0.0)
    return finish_solution(work, MatrixXd::Zero(M, P), t, 0.0);

  // Unconstrained solution; also the mu = 0 end of the bisection.
  MatrixXd B0(M, P);
  for (int m = 0; m < M; ++m) {
    VectorXd b;
    std::vector<int> all(P);
    for (int p = 0; p < P; ++p) all[p] = p;
    gram::solve_subset(work.grams[m], all, b);
    if (nonneg) {
      b = gram::solve_signed_quadratic(work.grams[m].G, work.grams[m].c,
                                       std::vector<Sign>(P, Sign::NonNegative));
    }
    B0.row(m) = b.transpose();
  }
  if (work.group_norm(B0) <= t) return finish_solution(work, B0, t, 0.0);

  MatrixXd B = warm && warm->size() ? *warm : MatrixXd::Zero(M, P);

  double lo = 0.0, hi = 1.0;
  while (true) {
    const double r = work.fista(hi, nonneg, B);
    (void)r;
    if (work.group_norm(B) <= t) break;
    hi *= 4.0;
    if (hi > 1e18) break;
  }
  MatrixXd B_hi = B;
  double kkt_hi = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double kkt = work.fista(mid, nonneg, B);
    if (work.group_norm(B) <= t) {
      hi = mid;
      B_hi = B;
      kkt_hi = kkt;
    } else {
      lo = mid;
    }
    if ((hi - lo) <= 1e-10 * (1.0 + hi)) break;
  }
  if (warm) *warm = B_hi;
  return finish_solution(work, B_hi, t, kkt_hi);
}

}  // namespace

SvsSolution svs_m_solve(const PanelDataset& data, double t, bool nonneg) {
  SvsWork work(data);
  return svs_solve_impl(work, t, nonneg, nullptr);
}

std::vector<SvsSolution> svs_m_path(const PanelDataset& data, int n_t, bool nonneg) {
  if (n_t < 2) throw ConstraintError("the t grid needs at least two points");
  SvsWork work(data);

  double t_max = 0.0;
  for (int m = 0; m < work.M; ++m) {
    std::vector<int> all(work.P);
    for (int p = 0; p < work.P; ++p) all[p] = p;
    VectorXd b;
    gram::solve_subset(work.grams[m], all, b);
    t_max += b.cwiseAbs().sum();
  }

  std::vector<SvsSolution> path;
  path.reserve(n_t);
  MatrixXd warm;
  for (int i = 0; i < n_t; ++i) {
    const double t = t_max * static_cast<double>(i) / (n_t - 1);
    path.push_back(svs_solve_impl(work, t, nonneg, &warm));
  }
  return path;
}

}  // namespace sbs
