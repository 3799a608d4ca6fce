#include "sbs/simlab.hpp"

#include "sbs/baselines.hpp"
#include "sbs/data.hpp"
#include "sbs/miqo.hpp"
#include "sbs/sps2.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace sbs {

namespace {

template <typename F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

int default_threads(const Overrides& ov) {
  if (ov.threads) return std::max(1, *ov.threads);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string fmt_cond(std::initializer_list<std::pair<const char*, double>> parts) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, value] : parts) {
    if (!first) os << ';';
    first = false;
    os << key << '=';
    if (value == static_cast<long long>(value))
      os << static_cast<long long>(value);
    else
      os << value;
  }
  return os.str();
}

// Generating design of the main simulation study: P = 35 with three active
// predictors (0-based 16, 17, 18) at 0.3, 1, 0.6.
SimDesign base_design() {
  SimDesign d;
  d.P = 35;
  d.beta_spec = {{16, 0.3}, {17, 1.0}, {18, 0.6}};
  return d;
}

// Block comparison design: five blocks of sizes 5..9 with strong within-block
// correlation and actives spread across blocks (0-based 1, 4, 13, 24, 29).
SimDesign block_design() {
  SimDesign d;
  d.P = 35;
  d.block_spec = {5, 6, 7, 8, 9};
  d.rho = 0.95;
  d.beta_spec = {{1, 0.1}, {4, 0.325}, {13, 0.55}, {24, 0.775}, {29, 1.0}};
  return d;
}

}  // namespace

MatrixXd gen_ar_corr_mvn(int P, double rho, int T, Philox& rng) {
  if (rho < 0.0 || rho >= 1.0) throw ConstraintError("rho must lie in [0, 1)");
  MatrixXd X(T, P);
  const double cond_sd = std::sqrt(1.0 - rho * rho);
  for (int t = 0; t < T; ++t) {
    double prev = 0.0;
    for (int p = 0; p < P; ++p) {
      const double z = rng.normal();
      const double x = (p == 0) ? z : rho * prev + cond_sd * z;
      X(t, p) = x;
      prev = x;
    }
  }
  return X;
}

MatrixXd gen_ar_corr_mvn(int P, double rho, int T, std::uint64_t seed) {
  Philox rng(seed, 0);
  return gen_ar_corr_mvn(P, rho, T, rng);
}

std::pair<PanelDataset, SystemTruth> gen_system(const SimDesign& design) {
  if (design.sigma2_eta <= 0.0) throw ConstraintError("sigma2_eta must be positive");
  std::vector<int> blocks = design.block_spec;
  if (blocks.empty()) blocks = {design.P};
  int total = 0;
  for (int b : blocks) total += b;
  if (total != design.P) throw DimensionMismatch("block sizes must add up to P");

  PanelDataset data;
  SystemTruth truth;
  truth.betas.setZero(design.M, design.P);
  VectorXd beta = VectorXd::Zero(design.P);
  for (const auto& [p, value] : design.beta_spec) {
    if (p < 0 || p >= design.P) throw ConstraintError("beta_spec index out of range");
    beta[p] = value;
    truth.support.push_back(p);
  }
  std::sort(truth.support.begin(), truth.support.end());
  for (int m = 0; m < design.M; ++m) truth.betas.row(m) = beta.transpose();

  const double sd_e = std::sqrt(design.sigma2_eta);
  for (int m = 0; m < design.M; ++m) {
    Philox rng(design.seed, stream_id(static_cast<std::uint32_t>(m) + 1u, 0));
    MatrixXd X(design.T, design.P);
    int at = 0;
    for (int b : blocks) {
      X.middleCols(at, b) = gen_ar_corr_mvn(b, design.rho, design.T, rng);
      at += b;
    }
    VectorXd eta(design.T);
    if (design.residual_model == SimDesign::Residuals::IID) {
      for (int t = 0; t < design.T; ++t) eta[t] = sd_e * rng.normal();
    } else {
      const double phi = design.ar1_phi;
      double state = sd_e / std::sqrt(1.0 - phi * phi) * rng.normal();
      for (int t = 0; t < design.T; ++t) {
        state = phi * state + sd_e * rng.normal();
        eta[t] = state;
      }
    }
    data.predictors.push_back(X);
    data.responses.push_back(X * beta + eta);
    data.response_names.push_back("y" + std::to_string(m + 1));
  }
  for (int p = 0; p < design.P; ++p)
    data.predictor_names.push_back("x" + std::to_string(p + 1));
  return {std::move(data), std::move(truth)};
}

SelectionMetrics metrics(const SystemTruth& truth, const MatrixXd& betas_hat) {
  IndexSet support;
  for (int p = 0; p < betas_hat.cols(); ++p)
    if (betas_hat.col(p).cwiseAbs().maxCoeff() > 0.0) support.push_back(p);
  return metrics(truth, betas_hat, support);
}

SelectionMetrics metrics(const SystemTruth& truth, const MatrixXd& betas_hat,
                         const IndexSet& support) {
  if (truth.betas.rows() != betas_hat.rows() || truth.betas.cols() != betas_hat.cols())
    throw DimensionMismatch("estimated and generating coefficient shapes differ");
  SelectionMetrics out;
  const double MP = static_cast<double>(truth.betas.size());
  out.mse_beta = (truth.betas - betas_hat).squaredNorm() / MP;
  out.exact_recovery = (support == truth.support);
  out.sparsity = static_cast<int>(support.size());
  out.n_negative = static_cast<int>((betas_hat.array() < 0.0).count());
  return out;
}

double pred_mse(const MatrixXd& betas, const PanelDataset& holdout) {
  return pred_mse(betas, VectorXd::Zero(betas.rows()), holdout);
}

double pred_mse(const MatrixXd& betas, const VectorXd& intercepts,
                const PanelDataset& holdout) {
  const int M = holdout.n_models();
  if (betas.rows() != M || betas.cols() != holdout.n_predictors() ||
      intercepts.size() != M)
    throw DimensionMismatch("coefficient shape differs from the holdout panel");
  double acc = 0.0;
  for (int m = 0; m < M; ++m) {
    const VectorXd fitted =
        (holdout.predictors[m] * betas.row(m).transpose()).array() + intercepts[m];
    acc += (holdout.responses[m] - fitted).squaredNorm() /
           static_cast<double>(holdout.n_obs());
  }
  return acc / M;
}

Experiment parse_experiment(const std::string& name) {
  if (name == "E1_corr" || name == "E1") return Experiment::E1_corr;
  if (name == "E2_shrink" || name == "E2") return Experiment::E2_shrink;
  if (name == "E3_serial" || name == "E3") return Experiment::E3_serial;
  if (name == "E4_compare" || name == "E4") return Experiment::E4_compare;
  if (name == "EB_runtime" || name == "EB") return Experiment::EB_runtime;
  throw Error("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::E1_corr: return "E1_corr";
    case Experiment::E2_shrink: return "E2_shrink";
    case Experiment::E3_serial: return "E3_serial";
    case Experiment::E4_compare: return "E4_compare";
    case Experiment::EB_runtime: return "EB_runtime";
  }
  return "?";
}

std::vector<ResultTable::Summary> ResultTable::summarise() const {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> acc;
  for (const auto& r : rows)
    acc[{r.condition, r.method, r.metric}].push_back(r.value);
  std::vector<Summary> out;
  for (const auto& [key, values] : acc) {
    Summary s;
    std::tie(s.condition, s.method, s.metric) = key;
    s.n = static_cast<int>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= s.n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    s.mean = mean;
    s.sd = s.n > 1 ? std::sqrt(var / (s.n - 1)) : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

PanelDataset panel_head_models(const PanelDataset& data, int M) {
  PanelDataset out;
  out.predictor_names = data.predictor_names;
  for (int m = 0; m < M; ++m) {
    out.responses.push_back(data.responses[m]);
    out.predictors.push_back(data.predictors[m]);
    if (m < static_cast<int>(data.response_names.size()))
      out.response_names.push_back(data.response_names[m]);
  }
  return out;
}

PanelDataset panel_first_rows(const PanelDataset& data, int rows) {
  PanelDataset out;
  out.predictor_names = data.predictor_names;
  out.response_names = data.response_names;
  for (int m = 0; m < data.n_models(); ++m) {
    out.responses.push_back(data.responses[m].head(rows).eval());
    out.predictors.push_back(data.predictors[m].topRows(rows).eval());
  }
  return out;
}

std::pair<PanelDataset, PanelDataset> panel_split_rows(const PanelDataset& data,
                                                       int first_rows) {
  PanelDataset head = panel_first_rows(data, first_rows);
  PanelDataset tail;
  tail.predictor_names = data.predictor_names;
  tail.response_names = data.response_names;
  const int rest = data.n_obs() - first_rows;
  for (int m = 0; m < data.n_models(); ++m) {
    tail.responses.push_back(data.responses[m].tail(rest).eval());
    tail.predictors.push_back(data.predictors[m].bottomRows(rest).eval());
  }
  return {std::move(head), std::move(tail)};
}

namespace {

ResultTable run_e1(const Overrides& ov) {
  const int N = ov.n_reps.value_or(100);
  const int T = ov.T.value_or(500);
  const std::uint64_t seed = ov.seed.value_or(42);
  const std::vector<double> rho_grid =
      ov.rho_grid.value_or(std::vector<double>{0.3, 0.5, 0.8, 0.95});
  const std::vector<int> m_grid = ov.m_grid.value_or(std::vector<int>{1, 5});
  const int M_max = *std::max_element(m_grid.begin(), m_grid.end());
  const double sigma2 = ov.sigma2.value_or(1.0);

  const int n_tasks = static_cast<int>(rho_grid.size()) * N;
  std::vector<std::vector<ResultRow>> buf(n_tasks);
  parallel_for(n_tasks, default_threads(ov), [&](int task) {
    const int ci = task / N;
    const int rep = task % N;
    SimDesign d = base_design();
    d.M = M_max;
    d.T = T;
    d.rho = rho_grid[ci];
    d.sigma2_eta = sigma2;
    d.seed = seed + 811 * static_cast<std::uint64_t>(task);
    auto [panel, truth] = gen_system(d);

    for (int M : m_grid) {
      PanelDataset sub = panel_head_models(panel, M);
      ConstraintSet cs;
      cs.sparsity_k = 3;
      SbsProblem prob(std::move(sub), cs);
      const SbsSolution sol = solve_sbs(prob, 3);
      SystemTruth t_m{truth.support, truth.betas.topRows(M)};
      const auto met = metrics(t_m, sol.betas, sol.selected());
      const std::string cond = fmt_cond({{"rho", rho_grid[ci]}, {"M", double(M)}});
      buf[task].push_back({"E1_corr", cond, rep, "SBS", "exact_recovery",
                           met.exact_recovery ? 1.0 : 0.0});
      buf[task].push_back({"E1_corr", cond, rep, "SBS", "mse_beta", met.mse_beta});
      buf[task].push_back({"E1_corr", cond, rep, "SBS", "nodes",
                           static_cast<double>(sol.nodes)});
    }
  });

  ResultTable table;
  for (auto& rows : buf)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_e2(const Overrides& ov) {
  const int N = ov.n_reps.value_or(10);
  const int T = ov.T.value_or(750);
  const int T_train = 500 * T / 750;  // keep the 2:1 split under overrides
  const std::uint64_t seed = ov.seed.value_or(42);
  const int lambda_n = ov.lambda_n.value_or(10);
  const double sigma2 = ov.sigma2.value_or(2.0);
  const double rho = ov.rho.value_or(0.95);
  const int k = 3;

  std::vector<std::vector<ResultRow>> buf(N);
  parallel_for(N, default_threads(ov), [&](int rep) {
    SimDesign d = base_design();
    d.M = 5;
    d.T = T;
    d.rho = rho;
    d.sigma2_eta = sigma2;
    d.seed = seed + 911 * static_cast<std::uint64_t>(rep);
    auto [panel, truth] = gen_system(d);
    auto [train, test] = panel_split_rows(panel, T_train);

    ConstraintSet cs;
    cs.sparsity_k = k;
    SbsProblem prob(train, cs);
    SbsSolution base = solve_sbs(prob, k);
    const double g_k = base.objective;
    const auto grid = lambda_grid(g_k, lambda_n);

    SbsSolution prev = base;
    for (size_t li = 0; li < grid.size(); ++li) {
      SbsSolution sol;
      if (li == 0) {
        sol = base;
      } else {
        ConstraintSet cl = cs;
        cl.shrink_lambda = grid[li];
        SbsProblem pl(train, cl);
        sol = solve_sbs(pl, k, &prev);
        prev = sol;
      }
      double rss = 0.0;
      for (int m = 0; m < train.n_models(); ++m)
        rss += (train.responses[m] - train.predictors[m] * sol.betas.row(m).transpose())
                   .squaredNorm();
      const double in_mse = rss / (train.n_models() * train.n_obs());
      const double out_mse = pred_mse(sol.betas, test);
      double spread = 0.0;
      for (int p = 0; p < train.n_predictors(); ++p) {
        const double hi = sol.betas.col(p).maxCoeff();
        const double lo = sol.betas.col(p).minCoeff();
        spread = std::max(spread, hi - lo);
      }
      const std::string cond = fmt_cond({{"lambda_idx", double(li)}});
      buf[rep].push_back({"E2_shrink", cond, rep, "SBS", "lambda", grid[li]});
      buf[rep].push_back({"E2_shrink", cond, rep, "SBS", "insample_mse", in_mse});
      buf[rep].push_back({"E2_shrink", cond, rep, "SBS", "outsample_mse", out_mse});
      buf[rep].push_back({"E2_shrink", cond, rep, "SBS", "beta_spread", spread});
    }
  });

  ResultTable table;
  for (auto& rows : buf)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_e3(const Overrides& ov) {
  const int N = ov.n_reps.value_or(50);
  const int T_full = ov.T.value_or(600);
  const std::uint64_t seed = ov.seed.value_or(42);
  const double rho = ov.rho.value_or(0.8);
  const double sigma2 = ov.sigma2.value_or(1.0);
  const int k = 3;
  std::vector<int> windows;
  for (int w = 500 * T_full / 600; w <= T_full; w += 20) windows.push_back(w);

  const std::vector<SarimaOrder> candidates = {
      SarimaOrder{0, 0, 0, 0, 0, 0, 1}, SarimaOrder{1, 0, 0, 0, 0, 0, 1},
      SarimaOrder{2, 0, 0, 0, 0, 0, 1}, SarimaOrder{0, 0, 1, 0, 0, 0, 1},
      SarimaOrder{1, 0, 1, 0, 0, 0, 1}};
  const SarimaOrder true_order{1, 0, 0, 0, 0, 0, 1};

  std::vector<std::vector<ResultRow>> buf(N);
  parallel_for(N, default_threads(ov), [&](int rep) {
    SimDesign d = base_design();
    d.M = 5;
    d.T = T_full;
    d.rho = rho;
    d.sigma2_eta = sigma2;
    d.residual_model = SimDesign::Residuals::AR1;
    d.ar1_phi = 0.9;
    d.seed = seed + 733 * static_cast<std::uint64_t>(rep);
    auto [panel, truth] = gen_system(d);

    std::vector<IndexSet> supports_single, supports_sps2;
    for (size_t wi = 0; wi < windows.size(); ++wi) {
      const PanelDataset sub = panel_first_rows(panel, windows[wi]);
      const std::string cond = fmt_cond({{"window", double(windows[wi])}});

      ConstraintSet cs;
      cs.sparsity_k = k;
      SbsProblem prob(sub, cs);
      const SbsSolution single = solve_sbs(prob, k);
      supports_single.push_back(single.selected());
      SystemTruth t_m{truth.support, truth.betas};
      buf[rep].push_back({"E3_serial", cond, rep, "SBS", "exact_recovery",
                          metrics(t_m, single.betas, single.selected()).exact_recovery
                              ? 1.0
                              : 0.0});

      Sps2Config cfg;
      cfg.candidate_orders = candidates;
      cfg.constraints = cs;
      cfg.criterion = Criterion::BIC;
      const Sps2Result r = run_sps2_single(sub, cfg, k);
      supports_sps2.push_back(r.final_solution.selected());
      buf[rep].push_back({"E3_serial", cond, rep, "SPS2", "exact_recovery",
                          metrics(t_m, r.final_solution.betas,
                                  r.final_solution.selected())
                                  .exact_recovery
                              ? 1.0
                              : 0.0});
      buf[rep].push_back(
          {"E3_serial", cond, rep, "SPS2", "converged", r.converged ? 1.0 : 0.0});
      buf[rep].push_back({"E3_serial", cond, rep, "SPS2", "iterations",
                          static_cast<double>(r.iterations_used)});

      int order_hits = 0, white_ok = 0;
      const int M = sub.n_models();
      for (int m = 0; m < M; ++m) {
        if (!r.final_fits.empty() && r.final_fits[m].order == true_order) ++order_hits;
        if (!r.final_fits.empty()) {
          const VectorXd resid =
              sub.responses[m] -
              sub.predictors[m] * r.final_solution.betas.row(m).transpose();
          const VectorXd white = whiten(resid, r.final_fits[m]);
          const auto ap = acf_pacf(white, 1);
          if (std::abs(ap.acf[1]) < 2.0 / std::sqrt(double(white.size()))) ++white_ok;
        }
      }
      buf[rep].push_back({"E3_serial", cond, rep, "SPS2", "order_correct_frac",
                          static_cast<double>(order_hits) / M});
      buf[rep].push_back({"E3_serial", cond, rep, "SPS2", "white_acf1_frac",
                          static_cast<double>(white_ok) / M});
    }

    auto distinct = [](std::vector<IndexSet> v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return static_cast<double>(v.size());
    };
    buf[rep].push_back({"E3_serial", "all_windows", rep, "SBS", "distinct_supports",
                        distinct(supports_single)});
    buf[rep].push_back({"E3_serial", "all_windows", rep, "SPS2", "distinct_supports",
                        distinct(supports_sps2)});
  });

  ResultTable table;
  for (auto& rows : buf)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_e4(const Overrides& ov) {
  const int N = ov.n_reps.value_or(10);
  const int T = ov.T.value_or(750);
  const int T_train = 500 * T / 750;
  const std::uint64_t seed = ov.seed.value_or(42);
  const double sigma2 = ov.sigma2.value_or(4.0);
  const int n_t = ov.n_t.value_or(50);
  const int k_hi = 8;

  std::vector<std::vector<ResultRow>> buf(N);
  parallel_for(N, default_threads(ov), [&](int rep) {
    SimDesign d = block_design();
    d.M = 5;
    d.T = T;
    d.sigma2_eta = sigma2;
    d.seed = seed + 577 * static_cast<std::uint64_t>(rep);
    auto [panel, truth] = gen_system(d);
    auto [train, test] = panel_split_rows(panel, T_train);
    const int M = train.n_models();
    const int P = train.n_predictors();

    auto emit = [&](const std::string& method, const SelectionMetrics& met,
                    double mse, double sparsity_avg) {
      buf[rep].push_back({"E4_compare", "block", rep, method, "sparsity_avg",
                          sparsity_avg});
      buf[rep].push_back({"E4_compare", "block", rep, method, "pred_mse", mse});
      buf[rep].push_back({"E4_compare", "block", rep, method, "exact_recovery",
                          met.exact_recovery ? 1.0 : 0.0});
      buf[rep].push_back({"E4_compare", "block", rep, method, "n_negative",
                          static_cast<double>(met.n_negative)});
    };

    {  // SBS with correlation screening and the positive-sign restriction
      ConstraintSet cs;
      cs.exclusion_pairs = build_hc_set(train, 0.9);
      for (int p = 0; p < P; ++p) cs.positive_signs.push_back(p);
      cs.sparsity_k = k_hi;
      SbsProblem prob(train, cs);
      std::vector<int> ks(k_hi);
      for (int i = 0; i < k_hi; ++i) ks[i] = i + 1;
      const auto path = solve_path(prob, ks);
      double best_mse = std::numeric_limits<double>::infinity();
      const SbsSolution* best = nullptr;
      for (const auto& sol : path) {
        if (sol.status == SolveStatus::Infeasible) continue;
        const double mse = pred_mse(sol.betas, test);
        if (mse < best_mse) {
          best_mse = mse;
          best = &sol;
        }
      }
      if (best != nullptr) {
        const auto met = metrics(truth, best->betas, best->selected());
        emit("SBS", met, best_mse, static_cast<double>(met.sparsity));
      }
    }

    {  // SVS-m and SVS-m+
      for (bool nonneg : {false, true}) {
        const auto path = svs_m_path(train, n_t, nonneg);
        double best_mse = std::numeric_limits<double>::infinity();
        const SvsSolution* best = nullptr;
        for (const auto& sol : path) {
          const double mse = pred_mse(sol.thresholded_betas, test);
          if (mse < best_mse) {
            best_mse = mse;
            best = &sol;
          }
        }
        const auto met = metrics(truth, best->thresholded_betas);
        double spars = 0.0;
        for (int m = 0; m < M; ++m)
          spars += (best->thresholded_betas.row(m).array() != 0.0).count();
        emit(nonneg ? "SVS-m+" : "SVS-m", met, best_mse, spars / M);
      }
    }

    {  // per-model forward stepwise
      MatrixXd betas = MatrixXd::Zero(M, P);
      VectorXd intercepts(M);
      double spars = 0.0;
      bool all_exact = true;
      for (int m = 0; m < M; ++m) {
        const auto fit = forward_stepwise(train.predictors[m], train.responses[m]);
        betas.row(m) = fit.beta.transpose();
        intercepts[m] = fit.intercept;
        spars += static_cast<double>(fit.support.size());
        IndexSet sup = fit.support;
        std::sort(sup.begin(), sup.end());
        if (sup != truth.support) all_exact = false;
      }
      const double mse = pred_mse(betas, intercepts, test);
      auto met = metrics(truth, betas);
      met.exact_recovery = all_exact;
      emit("Step-f", met, mse, spars / M);
    }
  });

  ResultTable table;
  for (auto& rows : buf)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_eb(const Overrides& ov) {
  const int repeats = ov.repeats.value_or(3);
  const int T = ov.T.value_or(500);
  const std::uint64_t seed = ov.seed.value_or(42);
  const std::vector<int> m_grid = ov.m_grid.value_or(std::vector<int>{1, 5, 10});
  const std::vector<int> p_grid = ov.p_grid.value_or(std::vector<int>{20, 30, 40});
  const int k = 3;

  struct Cell {
    int M, P;
    const char* sweep;
  };
  std::vector<Cell> cells;
  for (int M : m_grid) cells.push_back({M, 30, "M"});
  for (int P : p_grid) cells.push_back({5, P, "P"});

  ResultTable table;
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    for (int rep = 0; rep < repeats; ++rep) {
      SimDesign d;
      d.M = cell.M;
      d.T = T;
      d.P = cell.P;
      d.rho = 0.25;
      d.sigma2_eta = 1.0;
      d.beta_spec = {{0, 1.0}, {2, 1.0}, {4, 1.0}};
      d.seed = seed + 131 * static_cast<std::uint64_t>(ci * 97 + rep);
      auto [panel, truth] = gen_system(d);
      ConstraintSet cs;
      cs.sparsity_k = k;
      SbsProblem prob(std::move(panel), cs);

      const auto t0 = std::chrono::steady_clock::now();
      const SbsSolution sol = solve_sbs(prob, k);
      const auto t1 = std::chrono::steady_clock::now();
      const double secs = std::chrono::duration<double>(t1 - t0).count();

      std::ostringstream cond_os;
      cond_os << "sweep=" << cell.sweep << ";M=" << cell.M << ";P=" << cell.P
              << ";k=" << k;
      const std::string cond = cond_os.str();
      table.rows.push_back({"EB_runtime", cond, rep, "SBS", "solve_seconds", secs});
      table.rows.push_back({"EB_runtime", cond, rep, "SBS", "nodes",
                            static_cast<double>(sol.nodes)});
    }
  }
  return table;
}

}  // namespace

ResultTable run_experiment(Experiment experiment, const Overrides& overrides) {
  switch (experiment) {
    case Experiment::E1_corr: return run_e1(overrides);
    case Experiment::E2_shrink: return run_e2(overrides);
    case Experiment::E3_serial: return run_e3(overrides);
    case Experiment::E4_compare: return run_e4(overrides);
    case Experiment::EB_runtime: return run_eb(overrides);
  }
  throw Error("unhandled experiment");
}

}  // namespace sbs
