#include "sbs/sps2.hpp"

#include "sbs/simlab.hpp"

#include "doctest.h"
#include "helpers.hpp"

using namespace sbs;

TEST_SUITE_BEGIN("sps2");

namespace {

Sps2Iteration make_iter(std::vector<std::uint8_t> support, MatrixXd betas,
                        std::vector<SarimaOrder> orders) {
  return Sps2Iteration{std::move(support), std::move(betas), std::move(orders), 0.0};
}

}  // namespace

TEST_CASE("has_converged compares supports, orders, and coefficients") {
  MatrixXd b(1, 3);
  b << 1.0, 0.0, 2.0;
  const std::vector<SarimaOrder> orders = {SarimaOrder{1, 0, 0, 0, 0, 0, 1}};
  const auto a = make_iter({1, 0, 1}, b, orders);
  CHECK(has_converged(a, a, 1e-6));

  MatrixXd moved = b;
  moved(0, 2) += 2e-6;
  CHECK_FALSE(has_converged(a, make_iter({1, 0, 1}, moved, orders), 1e-6));
  CHECK(has_converged(a, make_iter({1, 0, 1}, moved, orders), 1e-5));

  CHECK_FALSE(has_converged(a, make_iter({1, 1, 0}, b, orders), 1e-6));
  CHECK_FALSE(has_converged(
      a, make_iter({1, 0, 1}, b, {SarimaOrder{2, 0, 0, 0, 0, 0, 1}}), 1e-6));
}

TEST_CASE("iid residuals with a white-noise candidate converge immediately") {
  SimDesign d;
  d.M = 2;
  d.T = 120;
  d.P = 6;
  d.rho = 0.3;
  d.beta_spec = {{1, 1.0}, {4, 0.7}};
  d.seed = 5;
  auto [panel, truth] = gen_system(d);

  Sps2Config cfg;
  cfg.candidate_orders = {SarimaOrder{0, 0, 0, 0, 0, 0, 1}};
  cfg.constraints.sparsity_k = 2;

  const auto result = run_sps2_single(panel, cfg, 2);
  CHECK(result.converged);
  CHECK(result.iterations_used <= 2);
  // identity filter: the filtered solve equals the raw solve
  const auto& first = result.iterations.front();
  const auto& last = result.iterations.back();
  CHECK(first.support == last.support);
  CHECK((first.betas - last.betas).cwiseAbs().maxCoeff() < 1e-9);
  for (const auto& fit : result.final_fits)
    CHECK(fit.order == SarimaOrder{0, 0, 0, 0, 0, 0, 1});
}

TEST_CASE("the two-step pass is at least as accurate under AR(1) residuals") {
  const std::vector<SarimaOrder> cands = {SarimaOrder{0, 0, 0, 0, 0, 0, 1},
                                          SarimaOrder{1, 0, 0, 0, 0, 0, 1}};
  int single_hits = 0, sps2_hits = 0;
  const int n = 6;
  for (int rep = 0; rep < n; ++rep) {
    SimDesign d;
    d.M = 3;
    d.T = 300;
    d.P = 12;
    d.rho = 0.85;
    d.beta_spec = {{4, 0.3}, {5, 1.0}, {6, 0.6}};
    d.residual_model = SimDesign::Residuals::AR1;
    d.ar1_phi = 0.9;
    d.seed = 900 + rep;
    auto [panel, truth] = gen_system(d);

    ConstraintSet cs;
    cs.sparsity_k = 3;
    SbsProblem prob(panel, cs);
    const auto single = solve_sbs(prob, 3);
    if (single.selected() == truth.support) ++single_hits;

    Sps2Config cfg;
    cfg.candidate_orders = cands;
    cfg.constraints = cs;
    const auto two_step = run_sps2_single(panel, cfg, 3);
    if (two_step.final_solution.selected() == truth.support) ++sps2_hits;
    CHECK(two_step.iterations_used <= cfg.maxiter);
    if (two_step.converged) {
      const auto& prev = two_step.iterations[two_step.iterations.size() - 2];
      CHECK(has_converged(prev, two_step.iterations.back(), cfg.beta_tol));
    }
  }
  CHECK(sps2_hits >= single_hits);
  CHECK(sps2_hits >= n / 2);
}

TEST_CASE("runs are deterministic for identical inputs") {
  SimDesign d;
  d.M = 2;
  d.T = 150;
  d.P = 8;
  d.rho = 0.5;
  d.beta_spec = {{2, 0.8}, {6, -0.5}};
  d.residual_model = SimDesign::Residuals::AR1;
  d.ar1_phi = 0.7;
  d.seed = 44;
  auto [panel, truth] = gen_system(d);

  Sps2Config cfg;
  cfg.candidate_orders = {SarimaOrder{0, 0, 0, 0, 0, 0, 1},
                          SarimaOrder{1, 0, 0, 0, 0, 0, 1}};
  cfg.constraints.sparsity_k = 2;

  const auto a = run_sps2_single(panel, cfg, 2);
  const auto b = run_sps2_single(panel, cfg, 2);
  CHECK(a.converged == b.converged);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK(a.final_solution.support == b.final_solution.support);
  CHECK((a.final_solution.betas - b.final_solution.betas).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("k_range runs each sparsity level independently") {
  SimDesign d;
  d.M = 1;
  d.T = 100;
  d.P = 6;
  d.beta_spec = {{0, 1.0}, {3, 0.9}};
  d.seed = 13;
  auto [panel, truth] = gen_system(d);

  Sps2Config cfg;
  cfg.candidate_orders = {SarimaOrder{0, 0, 0, 0, 0, 0, 1}};
  cfg.constraints.sparsity_k = 3;
  cfg.k_range = {1, 2, 3};
  const auto results = run_sps2(panel, cfg);
  REQUIRE(results.size() == 3);
  for (size_t i = 0; i < results.size(); ++i)
    CHECK(results[i].k == static_cast<int>(i) + 1);
  CHECK(results[1].final_solution.selected() == truth.support);
}

TEST_SUITE_END();
