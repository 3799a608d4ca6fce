#include "sbs/sarima.hpp"

#include "sbs/rng.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <numbers>

using namespace sbs;

TEST_SUITE_BEGIN("sarima");

namespace {

VectorXd simulate_ar1(Philox& rng, int T, double phi, double sd = 1.0) {
  VectorXd out(T);
  double state = sd / std::sqrt(1.0 - phi * phi) * rng.normal();
  for (int t = 0; t < T; ++t) {
    state = phi * state + sd * rng.normal();
    out[t] = state;
  }
  return out;
}

VectorXd simulate_ma1(Philox& rng, int T, double theta) {
  VectorXd out(T);
  double prev_e = rng.normal();
  for (int t = 0; t < T; ++t) {
    const double e = rng.normal();
    out[t] = e + theta * prev_e;
    prev_e = e;
  }
  return out;
}

// Simulates w_t = sum ar_i w_{t-1-i} + e_t + sum ma_j e_{t-1-j} from zero
// initial conditions, returning both the series and the innovations.
std::pair<VectorXd, VectorXd> simulate_arma(Philox& rng, int T, const VectorXd& ar,
                                            const VectorXd& ma) {
  VectorXd w = VectorXd::Zero(T), e = VectorXd::Zero(T);
  for (int t = 0; t < T; ++t) {
    e[t] = rng.normal();
    double v = e[t];
    for (int i = 0; i < ar.size() && t - 1 - i >= 0; ++i) v += ar[i] * w[t - 1 - i];
    for (int j = 0; j < ma.size() && t - 1 - j >= 0; ++j) v += ma[j] * e[t - 1 - j];
    w[t] = v;
  }
  return {w, e};
}

}  // namespace

TEST_CASE("seasonal differencing") {
  VectorXd a(3);
  a << 1, 2, 4;
  const VectorXd da = seasonal_difference(a, 1, 0, 1);
  CHECK(da.size() == 2);
  CHECK(da[0] == 1.0);
  CHECK(da[1] == 2.0);

  VectorXd b(4);
  b << 1, 2, 3, 4;
  const VectorXd db = seasonal_difference(b, 0, 1, 2);
  CHECK(db.size() == 2);
  CHECK(db[0] == 2.0);
  CHECK(db[1] == 2.0);

  Philox rng(1, 0);
  const VectorXd z = testutil::random_vector(rng, 50);
  const VectorXd twice = seasonal_difference(seasonal_difference(z, 1, 0, 1), 1, 0, 1);
  const VectorXd direct = seasonal_difference(z, 2, 0, 1);
  CHECK((twice - direct).cwiseAbs().maxCoeff() < 1e-12);

  const VectorXd ds_sd = seasonal_difference(seasonal_difference(z, 1, 0, 4), 0, 1, 4);
  const VectorXd sd_ds = seasonal_difference(seasonal_difference(z, 0, 1, 4), 1, 0, 4);
  CHECK((ds_sd - sd_ds).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(seasonal_difference(a, 2, 1, 2), SeriesTooShort);
}

TEST_CASE("css log-likelihood of white noise matches the iid value") {
  Philox rng(3, 0);
  const VectorXd z = testutil::random_vector(rng, 400);
  const SarimaOrder order{0, 0, 0, 0, 0, 0, 1};
  const double ll = css_loglik(z, order, VectorXd(0));
  const double s2 = z.squaredNorm() / z.size();
  const double ref = -0.5 * z.size() * (std::log(2 * std::numbers::pi * s2) + 1.0);
  CHECK(ll == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("AR(1) recursion reproduces the exact-fit innovations") {
  VectorXd y(3);
  y << 1.0, 0.9, 0.81;
  VectorXd params(1);
  params << 0.9;
  const VectorXd e = css_innovations(y, SarimaOrder{1, 0, 0, 0, 0, 0, 1}, params);
  REQUIRE(e.size() == 2);
  CHECK(std::abs(e[0]) < 1e-14);
  CHECK(std::abs(e[1]) < 1e-14);
}

TEST_CASE("css innovations match an independent straight-loop evaluator") {
  Philox rng(5, 0);
  const VectorXd y = testutil::random_vector(rng, 120);
  const SarimaOrder order{2, 0, 1, 1, 0, 1, 4};
  VectorXd params(order.n_params());
  params << 0.4, -0.2, 0.3, 0.35, -0.25;  // phi1 phi2 theta1 Phi1 Theta1

  // independent expansion: (1 - p1 z - p2 z^2)(1 - P1 z^4) and
  // (1 + t1 z)(1 + T1 z^4), multiplied term by term
  const int s = 4;
  std::vector<double> ar(2 + s, 0.0), ma(1 + s, 0.0);
  ar[0] = params[0];
  ar[1] = params[1];
  ar[s - 1] += params[3];
  ar[s + 0] -= params[0] * params[3];
  ar[s + 1] -= params[1] * params[3];
  ma[0] = params[2];
  ma[s - 1] += params[4];
  ma[s + 0] += params[2] * params[4];

  const int ncond = 2 + 1 * s;
  std::vector<double> resid(y.size(), 0.0);
  double ssq = 0.0;
  for (int t = ncond; t < y.size(); ++t) {
    double e = y[t];
    for (size_t i = 0; i < ar.size(); ++i) e -= ar[i] * y[t - 1 - static_cast<int>(i)];
    for (size_t j = 0; j < ma.size(); ++j) {
      const int idx = t - 1 - static_cast<int>(j);
      if (idx >= ncond) e -= ma[j] * resid[idx];
    }
    resid[t] = e;
    ssq += e * e;
  }
  const int t_eff = static_cast<int>(y.size()) - ncond;
  const double s2 = ssq / t_eff;
  const double ref_ll = -0.5 * t_eff * (std::log(2 * std::numbers::pi * s2) + 1.0);

  const VectorXd e = css_innovations(y, order, params);
  REQUIRE(e.size() == t_eff);
  for (int i = 0; i < t_eff; ++i) CHECK(std::abs(e[i] - resid[ncond + i]) < 1e-10);
  CHECK(css_loglik(y, order, params) == doctest::Approx(ref_ll).epsilon(1e-10));
}

TEST_CASE("css rejects non-stationary or non-invertible parameters") {
  Philox rng(7, 0);
  const VectorXd y = testutil::random_vector(rng, 60);
  VectorXd bad(1);
  bad << 1.05;
  CHECK_THROWS_AS(css_loglik(y, SarimaOrder{1, 0, 0, 0, 0, 0, 1}, bad),
                  NonStationaryParams);
  CHECK_THROWS_AS(css_loglik(y, SarimaOrder{0, 0, 1, 0, 0, 0, 1}, bad),
                  NonStationaryParams);
}

TEST_CASE("fit_sarima recovers an AR(1) coefficient across replicates") {
  int hits = 0;
  const int n = 50;
  for (int rep = 0; rep < n; ++rep) {
    Philox rng(1000 + rep, 1);
    const VectorXd y = simulate_ar1(rng, 600, 0.9);
    const auto fit = fit_sarima(y, SarimaOrder{1, 0, 0, 0, 0, 0, 1});
    if (std::abs(fit.phi[0] - 0.9) < 0.05) ++hits;
  }
  CHECK(hits >= 45);
}

TEST_CASE("fit_sarima recovers an MA(1) coefficient across replicates") {
  int hits = 0;
  const int n = 50;
  for (int rep = 0; rep < n; ++rep) {
    Philox rng(2000 + rep, 2);
    const VectorXd y = simulate_ma1(rng, 600, 0.5);
    const auto fit = fit_sarima(y, SarimaOrder{0, 0, 1, 0, 0, 0, 1});
    if (std::abs(fit.theta[0] - 0.5) < 0.07) ++hits;
  }
  CHECK(hits >= 45);
}

TEST_CASE("white-noise variance estimate lands within ten percent") {
  int hits = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Philox rng(3000 + rep, 3);
    const VectorXd y = testutil::random_vector(rng, 1000);
    const auto fit = fit_sarima(y, SarimaOrder{0, 0, 0, 0, 0, 0, 1});
    if (std::abs(fit.sigma2 - 1.0) < 0.1) ++hits;
  }
  CHECK(hits >= 18);
}

TEST_CASE("information criteria recompute from the log-likelihood") {
  Philox rng(11, 0);
  const VectorXd y = simulate_ar1(rng, 300, 0.7);
  const auto fit = fit_sarima(y, SarimaOrder{1, 0, 1, 0, 0, 0, 1});
  const int n_free = fit.order.n_params() + 1;
  const int t_eff = 300 - fit.order.ar_span();
  CHECK(fit.aic == doctest::Approx(-2 * fit.loglik + 2 * n_free));
  CHECK(fit.bic == doctest::Approx(-2 * fit.loglik + std::log(double(t_eff)) * n_free));
}

TEST_CASE("fitted likelihood is no worse than the Yule-Walker start") {
  Philox rng(13, 0);
  const VectorXd y = simulate_ar1(rng, 400, 0.8);
  const auto fit = fit_sarima(y, SarimaOrder{1, 0, 0, 0, 0, 0, 1});
  const auto ap = acf_pacf(y, 1);
  VectorXd yw(1);
  yw << 0.95 * ap.acf[1];
  CHECK(fit.loglik >= css_loglik(y, fit.order, yw) - 1e-9);
}

TEST_CASE("select_sarima prefers the generating order") {
  const std::vector<SarimaOrder> cands = {SarimaOrder{1, 0, 0, 0, 0, 0, 1},
                                          SarimaOrder{0, 0, 1, 0, 0, 0, 1}};
  int hits = 0;
  const int n = 50;
  for (int rep = 0; rep < n; ++rep) {
    Philox rng(4000 + rep, 4);
    const VectorXd y = simulate_ar1(rng, 600, 0.9);
    const auto best = select_sarima(y, cands, Criterion::BIC);
    if (best.order == cands[0]) ++hits;
  }
  CHECK(hits >= 40);
}

TEST_CASE("select_sarima prefers white noise over a spurious AR term") {
  const std::vector<SarimaOrder> cands = {SarimaOrder{0, 0, 0, 0, 0, 0, 1},
                                          SarimaOrder{1, 0, 0, 0, 0, 0, 1}};
  int hits = 0;
  const int n = 50;
  for (int rep = 0; rep < n; ++rep) {
    Philox rng(5000 + rep, 5);
    const VectorXd y = testutil::random_vector(rng, 500);
    const auto best = select_sarima(y, cands, Criterion::BIC);
    if (best.order == cands[0]) ++hits;
  }
  CHECK(hits >= 40);
}

TEST_CASE("select_sarima returns the single candidate and dominates the list") {
  Philox rng(17, 0);
  const VectorXd y = simulate_ar1(rng, 300, 0.6);
  const std::vector<SarimaOrder> single = {SarimaOrder{1, 0, 0, 0, 0, 0, 1}};
  CHECK(select_sarima(y, single).order == single[0]);

  const std::vector<SarimaOrder> cands = {
      SarimaOrder{0, 0, 0, 0, 0, 0, 1}, SarimaOrder{1, 0, 0, 0, 0, 0, 1},
      SarimaOrder{0, 0, 1, 0, 0, 0, 1}, SarimaOrder{2, 0, 0, 0, 0, 0, 1}};
  const auto best = select_sarima(y, cands, Criterion::BIC);
  for (const auto& order : cands)
    CHECK(best.bic <= fit_sarima(y, order).bic + 1e-9);
}

TEST_CASE("whiten is the identity for an order-free fit") {
  Philox rng(19, 0);
  const VectorXd y = testutil::random_vector(rng, 40);
  SarimaFit fit;
  fit.order = SarimaOrder{0, 0, 0, 0, 0, 0, 1};
  CHECK((whiten(y, fit) - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("whitening an AR(1) fit applies the lag filter") {
  Philox rng(23, 0);
  const VectorXd y = testutil::random_vector(rng, 50);
  SarimaFit fit;
  fit.order = SarimaOrder{1, 0, 0, 0, 0, 0, 1};
  fit.phi = VectorXd::Constant(1, 0.8);
  const VectorXd out = whiten(y, fit);
  REQUIRE(out.size() == 49);
  for (int t = 1; t < 50; ++t)
    CHECK(out[t - 1] == doctest::Approx(y[t] - 0.8 * y[t - 1]).epsilon(1e-12));
}

TEST_CASE("whitening the true model leaves white residuals") {
  Philox rng(29, 0);
  const int T = 1000;
  const VectorXd eta = simulate_ar1(rng, T, 0.9);
  SarimaFit fit;
  fit.order = SarimaOrder{1, 0, 0, 0, 0, 0, 1};
  fit.phi = VectorXd::Constant(1, 0.9);
  const VectorXd white = whiten(eta, fit);
  const auto ap = acf_pacf(white, 1);
  CHECK(std::abs(ap.acf[1]) < 2.0 / std::sqrt(double(white.size())));
}

TEST_CASE("whiten inverts the simulation recursion after burn-in") {
  Philox rng(31, 0);
  SarimaFit fit;
  fit.order = SarimaOrder{1, 1, 1, 0, 0, 0, 1};
  fit.phi = VectorXd::Constant(1, 0.6);
  fit.theta = VectorXd::Constant(1, 0.5);
  auto [w, e] = simulate_arma(rng, 600, fit.ar_poly(), fit.ma_poly());
  // integrate once for d = 1
  VectorXd series(601);
  series[0] = 0.0;
  for (int t = 0; t < 600; ++t) series[t + 1] = series[t] + w[t];

  const VectorXd rec = whiten(series, fit);
  const int offset = static_cast<int>(e.size() - rec.size());
  double max_err = 0.0;
  for (int t = 200; t < rec.size(); ++t)
    max_err = std::max(max_err, std::abs(rec[t] - e[t + offset]));
  CHECK(max_err < 1e-8);
}

TEST_CASE("filter_panel whitens responses and columns consistently") {
  Philox rng(37, 0);
  PanelDataset d = testutil::random_panel(rng, 2, 60, 3);

  std::vector<SarimaFit> identity(2);
  identity[0].order = identity[1].order = SarimaOrder{0, 0, 0, 0, 0, 0, 1};
  const auto same = filter_panel(d, identity);
  CHECK((same.responses[1] - d.responses[1]).cwiseAbs().maxCoeff() == 0.0);

  std::vector<SarimaFit> fits(2);
  fits[0].order = SarimaOrder{1, 0, 0, 0, 0, 0, 1};
  fits[0].phi = VectorXd::Constant(1, 0.7);
  fits[1].order = SarimaOrder{1, 0, 0, 0, 0, 0, 1};
  fits[1].phi = VectorXd::Constant(1, 0.4);
  const auto filtered = filter_panel(d, fits);
  for (int m = 0; m < 2; ++m) {
    CHECK(filtered.responses[m].size() == 59);
    for (int p = 0; p < 3; ++p) {
      const VectorXd ref = whiten(d.predictors[m].col(p), fits[m]);
      CHECK((filtered.predictors[m].col(p) - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  // differing orders still produce a rectangular panel
  fits[1].order = SarimaOrder{2, 0, 0, 0, 0, 0, 1};
  fits[1].phi = VectorXd::Zero(2);
  fits[1].phi << 0.3, 0.1;
  const auto mixed = filter_panel(d, fits);
  CHECK(mixed.responses[0].size() == mixed.responses[1].size());
  CHECK(mixed.predictors[0].rows() == mixed.predictors[1].rows());
}

TEST_CASE("acf and pacf basics") {
  Philox rng(41, 0);
  const VectorXd y = simulate_ar1(rng, 2000, 0.9);
  const auto ap = acf_pacf(y, 5);
  CHECK(ap.acf[0] == 1.0);
  CHECK(ap.acf[1] > 0.85);
  CHECK(ap.acf[1] < 0.95);
  CHECK(ap.pacf[0] == doctest::Approx(ap.acf[1]).epsilon(1e-12));
  // AR(1): pacf cuts off after lag 1
  CHECK(std::abs(ap.pacf[1]) < 0.1);

  const VectorXd z = testutil::random_vector(rng, 1000);
  const auto zp = acf_pacf(z, 20);
  int inside = 0;
  for (int lag = 1; lag <= 20; ++lag)
    if (std::abs(zp.acf[lag]) < 2.0 / std::sqrt(1000.0)) ++inside;
  CHECK(inside >= 18);
}

TEST_CASE("order parsing round-trips") {
  const auto o = SarimaOrder::parse("(2,0,1)(1,1,1,7)");
  CHECK(o.p == 2);
  CHECK(o.q == 1);
  CHECK(o.P == 1);
  CHECK(o.D == 1);
  CHECK(o.s == 7);
  CHECK(SarimaOrder::parse(o.str()) == o);
  CHECK(SarimaOrder::parse("(1,0,0)").s == 1);
  CHECK_THROWS_AS(SarimaOrder::parse("nope"), Error);
}

TEST_SUITE_END();
