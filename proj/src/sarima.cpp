#include "sbs/sarima.hpp"

#include "sbs/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace sbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// w_t = sum_i a_i w_{t-i} is stable iff the companion spectral radius is < 1.
bool stable_poly(const VectorXd& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return true;
  if (n == 1) return std::abs(a[0]) < 1.0;
  MatrixXd companion = MatrixXd::Zero(n, n);
  companion.row(0) = a.transpose();
  companion.block(1, 0, n - 1, n - 1).diagonal().setOnes();
  const auto eigs = companion.eigenvalues();
  return eigs.cwiseAbs().maxCoeff() < 1.0 - 1e-12;
}

// Monahan map from unconstrained values to a stationary AR block.
VectorXd partrans(const VectorXd& raw) {
  const int p = static_cast<int>(raw.size());
  VectorXd out(p), work(p);
  for (int i = 0; i < p; ++i) out[i] = std::tanh(raw[i]);
  work = out;
  for (int j = 1; j < p; ++j) {
    const double a = out[j];
    for (int kk = 0; kk < j; ++kk) work[kk] -= a * out[j - kk - 1];
    out.head(j) = work.head(j);
  }
  return out;
}

VectorXd invpartrans(const VectorXd& phi) {
  const int p = static_cast<int>(phi.size());
  VectorXd cur = phi, work(p);
  for (int j = p - 1; j > 0; --j) {
    const double a = cur[j];
    const double denom = 1.0 - a * a;
    for (int kk = 0; kk < j; ++kk)
      work[kk] = (cur[kk] + a * cur[j - kk - 1]) / denom;
    cur.head(j) = work.head(j);
  }
  VectorXd raw(p);
  for (int i = 0; i < p; ++i) {
    const double v = std::clamp(cur[i], -0.999, 0.999);
    raw[i] = std::atanh(v);
  }
  return raw;
}

struct ParamViews {
  VectorXd phi, theta, Phi, Theta;
};

ParamViews unpack(const SarimaOrder& o, const VectorXd& params) {
  if (params.size() != o.n_params())
    throw DimensionMismatch("parameter vector length differs from the order");
  ParamViews v;
  int at = 0;
  v.phi = params.segment(at, o.p); at += o.p;
  v.theta = params.segment(at, o.q); at += o.q;
  v.Phi = params.segment(at, o.P); at += o.P;
  v.Theta = params.segment(at, o.Q);
  return v;
}

VectorXd expand_product(const VectorXd& base, const VectorXd& seasonal, int s,
                        double cross_sign) {
  const int nb = static_cast<int>(base.size());
  const int ns = static_cast<int>(seasonal.size());
  VectorXd full = VectorXd::Zero(nb + ns * s);
  full.head(nb) = base;
  for (int j = 0; j < ns; ++j) {
    full[(j + 1) * s - 1] += seasonal[j];
    for (int i = 0; i < nb; ++i)
      full[(j + 1) * s + i] += cross_sign * base[i] * seasonal[j];
  }
  return full;
}

struct CssEval {
  double ssq = 0.0;
  int T_eff = 0;
  VectorXd innovations;  // retained only
};

// Innovation recursion on an already differenced series.
CssEval css_on_differenced(const VectorXd& w, const VectorXd& ar, const VectorXd& ma,
                           int ncond, bool keep) {
  const int n = static_cast<int>(w.size());
  const int na = static_cast<int>(ar.size());
  const int nm = static_cast<int>(ma.size());
  if (n <= ncond) throw SeriesTooShort("series too short for the requested order");
  CssEval out;
  out.T_eff = n - ncond;
  VectorXd resid = VectorXd::Zero(n);
  for (int t = ncond; t < n; ++t) {
    double e = w[t];
    for (int i = 0; i < na; ++i) e -= ar[i] * w[t - 1 - i];
    const int mmax = std::min(nm, t - ncond);
    for (int j = 0; j < mmax; ++j) e -= ma[j] * resid[t - 1 - j];
    resid[t] = e;
    out.ssq += e * e;
  }
  if (keep) out.innovations = resid.tail(out.T_eff);
  return out;
}

double loglik_from(const CssEval& ev) {
  const double s2 = std::max(ev.ssq / ev.T_eff, 1e-300);
  return -0.5 * ev.T_eff * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
}

// Compact deterministic Nelder-Mead (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5).
double nelder_mead(const std::function<double(const VectorXd&)>& f, VectorXd& x,
                   double step, double tol, int max_iter) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return f(x);
  std::vector<VectorXd> pts(n + 1, x);
  std::vector<double> val(n + 1);
  for (int i = 1; i <= n; ++i) pts[i][i - 1] += step;
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i]);

  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> ord(n + 1);
    for (int i = 0; i <= n; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int lo = ord[0], hi = ord[n], second = ord[n - 1];

    double diam = 0.0;
    for (int i = 1; i <= n; ++i)
      diam = std::max(diam, (pts[ord[i]] - pts[lo]).cwiseAbs().maxCoeff());
    if (diam < tol && std::abs(val[hi] - val[lo]) < tol * (1.0 + std::abs(val[lo])))
      break;

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != hi) centroid += pts[i];
    centroid /= n;

    const VectorXd refl = centroid + (centroid - pts[hi]);
    const double frefl = f(refl);
    if (frefl < val[lo]) {
      const VectorXd expd = centroid + 2.0 * (centroid - pts[hi]);
      const double fexp = f(expd);
      if (fexp < frefl) {
        pts[hi] = expd; val[hi] = fexp;
      } else {
        pts[hi] = refl; val[hi] = frefl;
      }
    } else if (frefl < val[second]) {
      pts[hi] = refl; val[hi] = frefl;
    } else {
      const VectorXd contr = centroid + 0.5 * (pts[hi] - centroid);
      const double fcon = f(contr);
      if (fcon < val[hi]) {
        pts[hi] = contr; val[hi] = fcon;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == lo) continue;
          pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  int lo = 0;
  for (int i = 1; i <= n; ++i)
    if (val[i] < val[lo]) lo = i;
  x = pts[lo];
  return val[lo];
}

VectorXd sample_acf(const VectorXd& w, int max_lag) {
  const int n = static_cast<int>(w.size());
  const double mean = w.mean();
  VectorXd centered = w.array() - mean;
  const double denom = centered.squaredNorm();
  VectorXd acf = VectorXd::Zero(max_lag + 1);
  acf[0] = 1.0;
  if (denom <= 0.0) return acf;
  for (int lag = 1; lag <= max_lag && lag < n; ++lag)
    acf[lag] = centered.head(n - lag).dot(centered.tail(n - lag)) / denom;
  return acf;
}

// Yule-Walker coefficients via Levinson-Durbin on an acf slice.
VectorXd levinson(const VectorXd& acf, int p) {
  VectorXd a = VectorXd::Zero(p), prev(p);
  double err = 1.0;
  for (int m = 0; m < p; ++m) {
    double acc = acf[m + 1];
    for (int i = 0; i < m; ++i) acc -= a[i] * acf[m - i];
    const double refl = err > 0.0 ? acc / err : 0.0;
    prev = a;
    a[m] = refl;
    for (int i = 0; i < m; ++i) a[i] = prev[i] - refl * prev[m - 1 - i];
    err *= (1.0 - refl * refl);
    if (err <= 0.0) err = 1e-12;
  }
  // Shrink slightly inside the stationary region for a safe optimiser start.
  return 0.95 * a;
}

}  // namespace

std::string SarimaOrder::str() const {
  std::ostringstream os;
  os << '(' << p << ',' << d << ',' << q << ")(" << P << ',' << D << ',' << Q << ','
     << s << ')';
  return os.str();
}

SarimaOrder SarimaOrder::parse(const std::string& text) {
  std::vector<int> nums;
  int cur = 0;
  bool in_num = false;
  for (char ch : text) {
    if (ch >= '0' && ch <= '9') {
      cur = cur * 10 + (ch - '0');
      in_num = true;
    } else {
      if (in_num) nums.push_back(cur);
      cur = 0;
      in_num = false;
    }
  }
  if (in_num) nums.push_back(cur);
  SarimaOrder o;
  if (nums.size() == 3) {
    o.p = nums[0]; o.d = nums[1]; o.q = nums[2];
  } else if (nums.size() == 6 || nums.size() == 7) {
    o.p = nums[0]; o.d = nums[1]; o.q = nums[2];
    o.P = nums[3]; o.D = nums[4]; o.Q = nums[5];
    o.s = nums.size() == 7 ? nums[6] : 1;
  } else {
    throw Error("cannot parse SARIMA order from '" + text + "'");
  }
  if (o.s < 1) throw Error("seasonal period must be >= 1 in '" + text + "'");
  return o;
}

VectorXd SarimaFit::ar_poly() const { return expand_product(phi, Phi, order.s, -1.0); }
VectorXd SarimaFit::ma_poly() const { return expand_product(theta, Theta, order.s, 1.0); }

VectorXd seasonal_difference(const VectorXd& series, int d, int D, int s) {
  if (d < 0 || D < 0 || s < 1) throw Error("invalid differencing specification");
  if (series.size() <= d + D * s)
    throw SeriesTooShort("series of length " + std::to_string(series.size()) +
                         " cannot be differenced " + std::to_string(d) + " + " +
                         std::to_string(D) + "*" + std::to_string(s) + " times");
  VectorXd w = series;
  for (int i = 0; i < d; ++i)
    w = (w.tail(w.size() - 1) - w.head(w.size() - 1)).eval();
  for (int i = 0; i < D; ++i)
    w = (w.tail(w.size() - s) - w.head(w.size() - s)).eval();
  return w;
}

double css_loglik(const VectorXd& series, const SarimaOrder& order,
                  const VectorXd& params) {
  const auto v = unpack(order, params);
  if (!stable_poly(v.phi) || !stable_poly(v.Phi))
    throw NonStationaryParams("AR polynomial has a root inside the unit circle");
  if (!stable_poly(-v.theta) || !stable_poly(-v.Theta))
    throw NonStationaryParams("MA polynomial has a root inside the unit circle");
  const VectorXd w = seasonal_difference(series, order.d, order.D, order.s);
  const VectorXd ar = expand_product(v.phi, v.Phi, order.s, -1.0);
  const VectorXd ma = expand_product(v.theta, v.Theta, order.s, 1.0);
  return loglik_from(css_on_differenced(w, ar, ma, order.ar_span(), false));
}

VectorXd css_innovations(const VectorXd& series, const SarimaOrder& order,
                         const VectorXd& params) {
  const auto v = unpack(order, params);
  const VectorXd w = seasonal_difference(series, order.d, order.D, order.s);
  const VectorXd ar = expand_product(v.phi, v.Phi, order.s, -1.0);
  const VectorXd ma = expand_product(v.theta, v.Theta, order.s, 1.0);
  return css_on_differenced(w, ar, ma, order.ar_span(), true).innovations;
}

SarimaFit fit_sarima(const VectorXd& series, const SarimaOrder& order) {
  const VectorXd w = seasonal_difference(series, order.d, order.D, order.s);
  const int n = static_cast<int>(w.size());
  const int npar = order.n_params();
  if (n - order.ar_span() < std::max(8, npar + 2))
    throw SeriesTooShort("too few observations to estimate " + order.str());

  const auto eval_raw = [&](const VectorXd& raw) -> double {
    int at = 0;
    const VectorXd phi = partrans(raw.segment(at, order.p)); at += order.p;
    const VectorXd theta = -partrans(raw.segment(at, order.q)); at += order.q;
    const VectorXd Phi = partrans(raw.segment(at, order.P)); at += order.P;
    const VectorXd Theta = -partrans(raw.segment(at, order.Q));
    const VectorXd ar = expand_product(phi, Phi, order.s, -1.0);
    const VectorXd ma = expand_product(theta, Theta, order.s, 1.0);
    return -loglik_from(css_on_differenced(w, ar, ma, order.ar_span(), false));
  };

  // Method-of-moments starts: Yule-Walker for the AR blocks, zeros for MA.
  VectorXd raw0 = VectorXd::Zero(npar);
  {
    const int need = std::max({order.p, order.P * order.s, 1});
    const VectorXd acf = sample_acf(w, std::min(need, n - 1));
    int at = 0;
    if (order.p > 0 && order.p < n)
      raw0.segment(at, order.p) = invpartrans(levinson(acf, order.p));
    at += order.p + order.q;
    if (order.P > 0 && order.P * order.s < n) {
      VectorXd seas(order.P + 1);
      for (int j = 0; j <= order.P; ++j)
        seas[j] = (j * order.s < acf.size()) ? acf[j * order.s] : 0.0;
      raw0.segment(at, order.P) = invpartrans(levinson(seas, order.P));
    }
  }

  double best_val = kInf;
  VectorXd best_raw = raw0;
  if (npar == 0) {
    best_val = eval_raw(raw0);
  } else {
    Philox rng(0x5a11u, 0);
    for (int restart = 0; restart < 6; ++restart) {
      VectorXd x = raw0;
      if (restart > 0)
        for (int i = 0; i < npar; ++i) x[i] += 0.4 * rng.normal();
      const double v = nelder_mead(eval_raw, x, 0.25, 1e-8, 400 * npar * npar + 800);
      if (v < best_val) {
        best_val = v;
        best_raw = x;
      }
    }
  }
  if (!std::isfinite(best_val))
    throw OptimFailed("no finite CSS likelihood found for " + order.str());

  SarimaFit fit;
  fit.order = order;
  int at = 0;
  fit.phi = partrans(best_raw.segment(at, order.p)); at += order.p;
  fit.theta = -partrans(best_raw.segment(at, order.q)); at += order.q;
  fit.Phi = partrans(best_raw.segment(at, order.P)); at += order.P;
  fit.Theta = -partrans(best_raw.segment(at, order.Q));

  const auto ev = css_on_differenced(w, fit.ar_poly(), fit.ma_poly(), order.ar_span(), false);
  fit.sigma2 = ev.ssq / ev.T_eff;
  fit.loglik = loglik_from(ev);
  const int n_free = npar + 1;  // + innovation variance
  fit.aic = -2.0 * fit.loglik + 2.0 * n_free;
  fit.bic = -2.0 * fit.loglik + std::log(static_cast<double>(ev.T_eff)) * n_free;
  return fit;
}

SarimaFit select_sarima(const VectorXd& series, const std::vector<SarimaOrder>& candidates,
                        Criterion criterion) {
  if (candidates.empty()) throw AllFitsFailed("empty candidate list");
  bool have = false;
  SarimaFit best;
  double best_score = kInf;
  for (const auto& order : candidates) {
    SarimaFit fit;
    try {
      fit = fit_sarima(series, order);
    } catch (const Error&) {
      continue;
    }
    const double score = criterion == Criterion::AIC ? fit.aic : fit.bic;
    const bool better =
        !have || score < best_score - 1e-12 ||
        (score <= best_score + 1e-12 && fit.order.n_params() < best.order.n_params());
    if (better) {
      best = fit;
      best_score = score;
      have = true;
    }
  }
  if (!have) throw AllFitsFailed("no SARIMA candidate could be fitted");
  return best;
}

VectorXd whiten(const VectorXd& series, const SarimaFit& fit) {
  const auto& o = fit.order;
  if (!stable_poly(-fit.ma_poly()))
    throw NonInvertibleMA("whitening requires an invertible MA operator");
  const VectorXd w = seasonal_difference(series, o.d, o.D, o.s);
  const VectorXd ar = fit.ar_poly();
  const VectorXd ma = fit.ma_poly();
  const int na = static_cast<int>(ar.size());
  const int nm = static_cast<int>(ma.size());
  const int n = static_cast<int>(w.size());
  if (n <= na) throw SeriesTooShort("series too short to whiten at this order");

  VectorXd u(n - na);
  for (int t = na; t < n; ++t) {
    double v = w[t];
    for (int i = 0; i < na; ++i) v -= ar[i] * w[t - 1 - i];
    u[t - na] = v;
  }
  VectorXd out(u.size());
  for (int t = 0; t < u.size(); ++t) {
    double v = u[t];
    for (int j = 0; j < nm && j < t; ++j) v -= ma[j] * out[t - 1 - j];
    out[t] = v;
  }
  return out;
}

PanelDataset filter_panel(const PanelDataset& data, const std::vector<SarimaFit>& fits) {
  const int M = data.n_models();
  if (static_cast<int>(fits.size()) != M)
    throw DimensionMismatch("one SARIMA fit per response is required");
  const int P = data.n_predictors();

  PanelDataset out;
  out.predictor_names = data.predictor_names;
  out.response_names = data.response_names;
  out.responses.resize(M);
  out.predictors.resize(M);

  int common = std::numeric_limits<int>::max();
  for (int m = 0; m < M; ++m) {
    out.responses[m] = whiten(data.responses[m], fits[m]);
    MatrixXd cols(out.responses[m].size(), P);
    for (int p = 0; p < P; ++p)
      cols.col(p) = whiten(data.predictors[m].col(p), fits[m]);
    out.predictors[m] = std::move(cols);
    common = std::min(common, static_cast<int>(out.responses[m].size()));
  }
  // Keep the panel rectangular: drop leading rows where models differ.
  for (int m = 0; m < M; ++m) {
    const int extra = static_cast<int>(out.responses[m].size()) - common;
    if (extra > 0) {
      out.responses[m] = out.responses[m].tail(common).eval();
      out.predictors[m] = out.predictors[m].bottomRows(common).eval();
    }
  }
  return out;
}

AcfPacf acf_pacf(const VectorXd& series, int max_lag) {
  if (max_lag >= series.size())
    throw SeriesTooShort("max_lag must be smaller than the series length");
  AcfPacf out;
  out.acf = sample_acf(series, max_lag);
  out.pacf = VectorXd::Zero(max_lag);
  // Durbin-Levinson: pacf at lag m is the last coefficient of the AR(m) fit.
  VectorXd a = VectorXd::Zero(max_lag), prev(max_lag);
  double err = 1.0;
  for (int m = 0; m < max_lag; ++m) {
    double acc = out.acf[m + 1];
    for (int i = 0; i < m; ++i) acc -= a[i] * out.acf[m - i];
    const double refl = err > 0.0 ? acc / err : 0.0;
    prev = a;
    a[m] = refl;
    for (int i = 0; i < m; ++i) a[i] = prev[i] - refl * prev[m - 1 - i];
    err *= (1.0 - refl * refl);
    if (err <= 0.0) err = 1e-12;
    out.pacf[m] = refl;
  }
  return out;
}

VectorXd param_std_errors(const VectorXd& series, const SarimaFit& fit) {
  const auto& o = fit.order;
  const int n = o.n_params();
  VectorXd params(n);
  int at = 0;
  params.segment(at, o.p) = fit.phi; at += o.p;
  params.segment(at, o.q) = fit.theta; at += o.q;
  params.segment(at, o.P) = fit.Phi; at += o.P;
  params.segment(at, o.Q) = fit.Theta;

  if (n == 0) return VectorXd(0);
  const double h = 1e-4;
  auto ll = [&](const VectorXd& x) {
    try {
      return css_loglik(series, o, x);
    } catch (const Error&) {
      return -kInf;
    }
  };
  MatrixXd H(n, n);
  const double f0 = ll(params);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      VectorXd pp = params, pm = params, mp = params, mm = params;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      const double v = (ll(pp) - ll(pm) - ll(mp) + ll(mm)) / (4.0 * h * h);
      H(i, j) = v;
      H(j, i) = v;
    }
  (void)f0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(-H);
  VectorXd se(n);
  // Invert the observed information where it is positive definite.
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  MatrixXd cov = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (vals[i] > 1e-10)
      cov += vecs.col(i) * vecs.col(i).transpose() / vals[i];
  for (int i = 0; i < n; ++i)
    se[i] = cov(i, i) > 0.0 ? std::sqrt(cov(i, i)) : std::numeric_limits<double>::quiet_NaN();
  return se;
}

}  // namespace sbs
