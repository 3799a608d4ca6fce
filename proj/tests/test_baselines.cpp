#include "sbs/baselines.hpp"

#include "sbs/regress.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <Eigen/QR>

#include <cmath>

using namespace sbs;

TEST_SUITE_BEGIN("baselines");

namespace {

// Orthonormal columns with exactly zero means (so the intercept is inert).
MatrixXd centered_orthonormal(Philox& rng, int T, int P) {
  MatrixXd raw = testutil::random_matrix(rng, T, P);
  raw.rowwise() -= raw.colwise().mean();
  Eigen::HouseholderQR<MatrixXd> qr(raw);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(T, P);
  Q.rowwise() -= Q.colwise().mean();
  // one Gram-Schmidt sweep to restore orthogonality after centering
  for (int p = 0; p < P; ++p) {
    for (int j = 0; j < p; ++j) Q.col(p) -= Q.col(j).dot(Q.col(p)) * Q.col(j);
    Q.col(p) /= Q.col(p).norm();
  }
  return Q;
}

}  // namespace

TEST_CASE("stepwise first pick maximises the absolute inner product") {
  Philox rng(301, 0);
  const int T = 60, P = 6;
  const MatrixXd X = centered_orthonormal(rng, T, P);
  VectorXd y = 2.0 * X.col(3) + 0.5 * X.col(1);
  y.array() -= y.mean();
  const auto fit = forward_stepwise(X, y);
  REQUIRE(!fit.support.empty());
  int best = 0;
  for (int p = 1; p < P; ++p)
    if (std::abs(X.col(p).dot(y)) > std::abs(X.col(best).dot(y))) best = p;
  CHECK(fit.support.front() == best);
  CHECK(best == 3);
}

TEST_CASE("each greedy step matches a one-step lookahead oracle") {
  Philox rng(307, 0);
  const int T = 50, P = 10;
  const MatrixXd X = testutil::random_matrix(rng, T, P);
  VectorXd beta = VectorXd::Zero(P);
  beta[1] = 1.2;
  beta[4] = -0.8;
  beta[7] = 0.5;
  const VectorXd y = X * beta + 0.5 * testutil::random_vector(rng, T);
  const auto fit = forward_stepwise(X, y);

  std::vector<int> chosen;
  MatrixXd ones = MatrixXd::Ones(T, 1);
  for (size_t step = 0; step < fit.support.size(); ++step) {
    double best_rss = std::numeric_limits<double>::infinity();
    int best_p = -1;
    for (int p = 0; p < P; ++p) {
      if (std::find(chosen.begin(), chosen.end(), p) != chosen.end()) continue;
      MatrixXd Xs(T, chosen.size() + 2);
      Xs.col(0).setOnes();
      for (size_t i = 0; i < chosen.size(); ++i) Xs.col(i + 1) = X.col(chosen[i]);
      Xs.col(chosen.size() + 1) = X.col(p);
      const double rss = ols(Xs, y).rss;
      if (rss < best_rss - 1e-12) {
        best_rss = rss;
        best_p = p;
      }
    }
    CHECK(fit.support[step] == best_p);
    CHECK(fit.rss_path[step + 1] == doctest::Approx(best_rss).epsilon(1e-8));
    chosen.push_back(best_p);
  }
  for (size_t i = 1; i < fit.rss_path.size(); ++i)
    CHECK(fit.rss_path[i] < fit.rss_path[i - 1]);
  for (size_t i = 1; i < fit.aic_path.size(); ++i)
    CHECK(fit.aic_path[i] < fit.aic_path[i - 1]);
}

TEST_CASE("svs budget zero forces all coefficients to zero") {
  Philox rng(311, 0);
  const PanelDataset d = testutil::random_panel(rng, 2, 30, 4);
  const auto sol = svs_m_solve(d, 0.0);
  CHECK(sol.betas.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.active_set.empty());
}

TEST_CASE("a slack budget reproduces the unconstrained fits") {
  Philox rng(313, 0);
  const PanelDataset d = testutil::random_panel(rng, 2, 40, 3);
  double t_max = 0.0;
  MatrixXd unconstrained(2, 3);
  for (int m = 0; m < 2; ++m) {
    const auto fit = ols(d.predictors[m], d.responses[m]);
    unconstrained.row(m) = fit.beta.transpose();
    t_max += fit.beta.cwiseAbs().sum();
  }
  const auto sol = svs_m_solve(d, t_max);
  CHECK((sol.betas - unconstrained).cwiseAbs().maxCoeff() < 1e-7);
  double attained = 0.0;
  for (int p = 0; p < 3; ++p) attained += sol.betas.col(p).cwiseAbs().maxCoeff();
  CHECK(attained <= t_max + 1e-6);
}

TEST_CASE("mid-range budget matches a cap-decomposition oracle") {
  // Orthogonal columns within each model make the constrained optimum
  // computable by gridding per-predictor caps and clipping the OLS values.
  Philox rng(317, 0);
  const int T = 24;
  PanelDataset d;
  for (int m = 0; m < 2; ++m) {
    MatrixXd X = centered_orthonormal(rng, T, 2) * 2.0;
    d.predictors.push_back(X);
    d.responses.push_back(X.col(0) * (m ? 1.1 : 0.7) - X.col(1) * (m ? 0.4 : 0.9) +
                          0.2 * testutil::random_vector(rng, T));
  }
  d.predictor_names = {"a", "b"};
  d.response_names = {"y1", "y2"};

  const double t = 0.8;
  const auto sol = svs_m_solve(d, t);

  double oracle = std::numeric_limits<double>::infinity();
  const int steps = 1600;
  for (int i = 0; i <= steps; ++i) {
    const double cap0 = t * i / steps;
    const double cap1 = t - cap0;
    double obj = 0.0;
    for (int m = 0; m < 2; ++m) {
      for (int p = 0; p < 2; ++p) {
        const double g = d.predictors[m].col(p).squaredNorm();
        const double c = d.predictors[m].col(p).dot(d.responses[m]);
        const double cap = p == 0 ? cap0 : cap1;
        const double b = std::clamp(c / g, -cap, cap);
        obj += g * b * b - 2 * c * b;
      }
      obj += d.responses[m].squaredNorm();
    }
    oracle = std::min(oracle, obj);
  }
  CHECK(sol.objective <= oracle + 1e-2);
  CHECK(std::abs(sol.objective - oracle) < 1e-2);
  CHECK(sol.kkt_residual <= 1e-6 * (1.0 + sol.betas.cwiseAbs().maxCoeff()));
}

TEST_CASE("soft-thresholding behaviour on an orthonormal single-model design") {
  Philox rng(331, 0);
  const int T = 40, P = 5;
  PanelDataset d;
  d.predictors.push_back(centered_orthonormal(rng, T, P));
  d.responses.push_back(d.predictors[0] * VectorXd::LinSpaced(P, -1.0, 1.5) +
                        0.1 * testutil::random_vector(rng, T));
  d.predictor_names = {"a", "b", "c", "d", "e"};
  d.response_names = {"y"};
  const VectorXd b_ols = ols(d.predictors[0], d.responses[0]).beta;
  const auto sol = svs_m_solve(d, 0.5 * b_ols.cwiseAbs().sum());
  for (int p = 0; p < P; ++p)
    CHECK(std::abs(sol.betas(0, p)) <= std::abs(b_ols[p]) + 1e-6);
}

TEST_CASE("path endpoints, monotonicity, and thresholding") {
  Philox rng(337, 0);
  const PanelDataset d = testutil::random_panel(rng, 2, 35, 4);
  const auto path = svs_m_path(d, 8);
  REQUIRE(path.size() == 8);
  CHECK(path.front().betas.cwiseAbs().maxCoeff() == 0.0);
  for (size_t i = 1; i < path.size(); ++i)
    CHECK(path[i].objective <= path[i - 1].objective + 1e-6);
  for (const auto& sol : path) {
    double attained = 0.0;
    for (int p = 0; p < 4; ++p) attained += sol.betas.col(p).cwiseAbs().maxCoeff();
    CHECK(attained <= sol.t_value + 1e-6);
    const double cut = sol.t_value * std::exp(-4.0);
    for (int p = 0; p < 4; ++p) {
      const bool active = std::find(sol.active_set.begin(), sol.active_set.end(), p) !=
                          sol.active_set.end();
      if (active)
        CHECK(sol.betas.col(p).cwiseAbs().maxCoeff() > cut);
      else
        CHECK(sol.thresholded_betas.col(p).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("the nonnegative variant never returns a negative coefficient") {
  Philox rng(347, 0);
  PanelDataset d = testutil::random_panel(rng, 3, 45, 5);
  const auto path = svs_m_path(d, 6, true);
  for (const auto& sol : path) CHECK(sol.betas.minCoeff() >= -1e-10);
}

TEST_SUITE_END();
