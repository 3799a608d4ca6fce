#include "sbs/simlab.hpp"

#include "sbs/regress.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>

using namespace sbs;

TEST_SUITE_BEGIN("simlab");

TEST_CASE("the AR(1) correlation has the expected triangular factor") {
  MatrixXd sigma(2, 2);
  sigma << 1.0, 0.5, 0.5, 1.0;
  const MatrixXd L = Eigen::LLT<MatrixXd>(sigma).matrixL();
  CHECK(L(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(L(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(L(1, 1) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));

  // the generator implements exactly this factor as a running recursion
  Philox rng(99, 0);
  const MatrixXd X = gen_ar_corr_mvn(2, 0.5, 4, rng);
  Philox replay(99, 0);
  for (int t = 0; t < 4; ++t) {
    const double z1 = replay.normal();
    const double z2 = replay.normal();
    CHECK(X(t, 0) == doctest::Approx(z1).epsilon(1e-14));
    CHECK(X(t, 1) == doctest::Approx(0.5 * z1 + std::sqrt(0.75) * z2).epsilon(1e-14));
  }
}

TEST_CASE("generated columns decorrelate at rho = 0") {
  const MatrixXd X = gen_ar_corr_mvn(4, 0.0, 5000, std::uint64_t{11});
  for (int p = 0; p < 4; ++p)
    for (int s = p + 1; s < 4; ++s) {
      const VectorXd a = X.col(p).array() - X.col(p).mean();
      const VectorXd b = X.col(s).array() - X.col(s).mean();
      CHECK(std::abs(a.dot(b) / (a.norm() * b.norm())) < 3.0 / std::sqrt(5000.0));
    }
}

TEST_CASE("adjacent columns carry the design correlation at rho = 0.95") {
  const MatrixXd X = gen_ar_corr_mvn(3, 0.95, 5000, std::uint64_t{13});
  for (int p = 0; p + 1 < 3; ++p) {
    const VectorXd a = X.col(p).array() - X.col(p).mean();
    const VectorXd b = X.col(p + 1).array() - X.col(p + 1).mean();
    CHECK(a.dot(b) / (a.norm() * b.norm()) == doctest::Approx(0.95).epsilon(0.021));
  }
}

TEST_CASE("gen_system scales the response variance with sigma2") {
  SimDesign d;
  d.M = 1;
  d.T = 5000;
  d.P = 4;
  d.sigma2_eta = 1.0;
  d.seed = 21;
  auto [panel, truth] = gen_system(d);
  const VectorXd& y = panel.responses[0];
  const double var = (y.array() - y.mean()).square().sum() / (y.size() - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.1));
  CHECK(truth.support.empty());
}

TEST_CASE("AR(1) residuals carry their autocorrelation") {
  SimDesign d;
  d.M = 1;
  d.T = 5000;
  d.P = 3;
  d.residual_model = SimDesign::Residuals::AR1;
  d.ar1_phi = 0.9;
  d.seed = 22;
  auto [panel, truth] = gen_system(d);
  const VectorXd eta = panel.responses[0];  // beta_spec empty: y == eta
  double num = 0.0, den = 0.0;
  const double mean = eta.mean();
  for (int t = 0; t + 1 < eta.size(); ++t) num += (eta[t] - mean) * (eta[t + 1] - mean);
  for (int t = 0; t < eta.size(); ++t) den += (eta[t] - mean) * (eta[t] - mean);
  CHECK(num / den == doctest::Approx(0.9).epsilon(0.034));
}

TEST_CASE("ols on the true support recovers the design coefficients") {
  SimDesign d;
  d.M = 1;
  d.T = 2000;
  d.P = 35;
  d.rho = 0.5;
  d.beta_spec = {{16, 0.3}, {17, 1.0}, {18, 0.6}};
  d.seed = 23;
  auto [panel, truth] = gen_system(d);
  MatrixXd X(d.T, 3);
  for (int i = 0; i < 3; ++i) X.col(i) = panel.predictors[0].col(16 + i);
  const auto fit = ols(X, panel.responses[0]);
  const MatrixXd cov = (X.transpose() * X).inverse() * fit.rss / (d.T - 3);
  const double targets[3] = {0.3, 1.0, 0.6};
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(fit.beta[i] - targets[i]) < 3.0 * std::sqrt(cov(i, i)));
}

TEST_CASE("metrics arithmetic") {
  SystemTruth truth;
  truth.support = {0};
  truth.betas = MatrixXd::Zero(1, 2);
  truth.betas(0, 0) = 1.0;

  SUBCASE("perfect estimate") {
    const auto met = metrics(truth, truth.betas);
    CHECK(met.mse_beta == 0.0);
    CHECK(met.exact_recovery);
    CHECK(met.sparsity == 1);
    CHECK(met.n_negative == 0);
  }
  SUBCASE("all-zero estimate") {
    const auto met = metrics(truth, MatrixXd::Zero(1, 2));
    CHECK(met.mse_beta == doctest::Approx(0.5));
    CHECK_FALSE(met.exact_recovery);
    CHECK(met.sparsity == 0);
  }
  SUBCASE("negative entry is counted") {
    MatrixXd est = truth.betas;
    est(0, 1) = -0.2;
    CHECK(metrics(truth, est).n_negative == 1);
  }
}

TEST_CASE("pred_mse identities and reference loop") {
  Philox rng(401, 0);
  PanelDataset d = testutil::random_panel(rng, 2, 30, 3);
  MatrixXd betas = testutil::random_matrix(rng, 2, 3);
  for (int m = 0; m < 2; ++m)
    d.responses[m] = d.predictors[m] * betas.row(m).transpose();
  CHECK(pred_mse(betas, d) == doctest::Approx(0.0).epsilon(1e-12));

  const PanelDataset noisy = testutil::random_panel(rng, 2, 30, 3);
  double ref = 0.0;
  for (int m = 0; m < 2; ++m) {
    double acc = 0.0;
    for (int t = 0; t < 30; ++t) {
      double fitted = 0.0;
      for (int p = 0; p < 3; ++p) fitted += noisy.predictors[m](t, p) * betas(m, p);
      acc += (noisy.responses[m][t] - fitted) * (noisy.responses[m][t] - fitted);
    }
    ref += acc / 30.0;
  }
  ref /= 2.0;
  CHECK(pred_mse(betas, noisy) == doctest::Approx(ref).epsilon(1e-12));

  double zero_ref = 0.0;
  for (int m = 0; m < 2; ++m) zero_ref += noisy.responses[m].squaredNorm() / 30.0;
  CHECK(pred_mse(MatrixXd::Zero(2, 3), noisy) == doctest::Approx(zero_ref / 2));
}

TEST_CASE("experiment names parse and reject unknowns") {
  CHECK(parse_experiment("E1_corr") == Experiment::E1_corr);
  CHECK(parse_experiment("EB") == Experiment::EB_runtime);
  CHECK_THROWS_AS(parse_experiment("E9"), Error);
}

TEST_CASE("experiments are deterministic given a seed, whatever the thread count") {
  Overrides a;
  a.n_reps = 2;
  a.seed = 7;
  a.T = 120;
  a.rho_grid = std::vector<double>{0.3};
  a.threads = 1;
  Overrides b = a;
  b.threads = 2;
  const auto ra = run_experiment(Experiment::E1_corr, a);
  const auto rb = run_experiment(Experiment::E1_corr, b);
  REQUIRE(ra.rows.size() == rb.rows.size());
  for (size_t i = 0; i < ra.rows.size(); ++i) {
    CHECK(ra.rows[i].condition == rb.rows[i].condition);
    CHECK(ra.rows[i].metric == rb.rows[i].metric);
    CHECK(ra.rows[i].replicate == rb.rows[i].replicate);
    CHECK(ra.rows[i].value == rb.rows[i].value);
  }
}

TEST_CASE("summaries aggregate by condition, method, and metric") {
  ResultTable t;
  t.rows.push_back({"X", "c", 0, "m", "v", 1.0});
  t.rows.push_back({"X", "c", 1, "m", "v", 3.0});
  const auto s = t.summarise();
  REQUIRE(s.size() == 1);
  CHECK(s[0].n == 2);
  CHECK(s[0].mean == doctest::Approx(2.0));
  CHECK(s[0].sd == doctest::Approx(std::sqrt(2.0)));
}

TEST_SUITE_END();
