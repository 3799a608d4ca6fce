#include "sbs/cli.hpp"

#include "sbs/csv.hpp"
#include "sbs/miqo.hpp"
#include "sbs/sps2.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace sbs::cli {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_acf_svg(const std::string& path, const VectorXd& acf, double band) {
  const int n = static_cast<int>(acf.size());
  const double width = 640.0, height = 240.0, mid = height / 2.0;
  const double dx = width / (n + 1);
  std::ofstream svg(path);
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
      << height << "'>\n";
  svg << "<line x1='0' y1='" << mid << "' x2='" << width << "' y2='" << mid
      << "' stroke='black'/>\n";
  for (double sign : {1.0, -1.0}) {
    const double y = mid - sign * band * mid;
    svg << "<line x1='0' y1='" << y << "' x2='" << width << "' y2='" << y
        << "' stroke='blue' stroke-dasharray='4'/>\n";
  }
  for (int i = 0; i < n; ++i) {
    const double x = dx * (i + 1);
    const double y = mid - std::clamp(acf[i], -1.0, 1.0) * mid;
    svg << "<line x1='" << x << "' y1='" << mid << "' x2='" << x << "' y2='" << y
        << "' stroke='black'/>\n";
  }
  svg << "</svg>\n";
}

// Joint residual-model BIC used to pick one k from the fitted range: summed
// CSS log-likelihoods penalised for the SARIMA parameters plus the k*M
// regression coefficients.
double pipeline_bic(const Sps2Result& r, int k, int T) {
  double ll = 0.0, params = 0.0, n_total = 0.0;
  for (const auto& fit : r.final_fits) {
    ll += fit.loglik;
    params += fit.order.n_params() + 1;
    n_total += std::max(2, T - fit.order.diff_span() - fit.order.ar_span());
  }
  const int M = static_cast<int>(r.final_fits.size());
  params += static_cast<double>(k) * M;
  return -2.0 * ll + std::log(std::max(2.0, n_total)) * params;
}

}  // namespace

int run_fit(const RunConfig& cfg, bool write_plots) {
  const LoadedPanel panel = load_panel(cfg);
  fs::create_directories(cfg.out_dir);

  const Feasibility feas = check_feasible(panel.constraints);
  if (!feas.feasible) {
    std::cerr << "infeasible constraints: " << feas.reason << " (k_max=" << feas.k_max
              << ")\n";
    return kExitInfeasible;
  }
  for (int k : cfg.k_range)
    if (panel.constraints.equality_sparsity && k > feas.k_max) {
      std::cerr << "infeasible constraints: k=" << k << " exceeds k_max=" << feas.k_max
                << "\n";
      return kExitInfeasible;
    }

  Sps2Config sps;
  sps.k_range = cfg.k_range;
  sps.candidate_orders = cfg.candidates;
  sps.maxiter = cfg.maxiter;
  sps.beta_tol = cfg.beta_tol;
  sps.criterion = cfg.criterion;
  sps.constraints = panel.constraints;
  sps.constraints.shrink_lambda = cfg.lambda;

  const auto results = run_sps2(panel.data, sps);
  if (results.empty()) return kExitError;

  // Pick one k by the summed residual-model BIC (documented in the README).
  const Sps2Result* chosen = nullptr;
  double best_bic = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::string>> path_rows;
  for (const auto& r : results) {
    if (r.final_solution.status == SolveStatus::Infeasible || r.final_fits.empty())
      continue;
    const double bic = pipeline_bic(r, r.k, panel.data.n_obs());
    path_rows.push_back({std::to_string(r.k), csv::format(r.final_solution.objective),
                         csv::format(bic), r.converged ? "true" : "false",
                         std::to_string(r.iterations_used)});
    if (bic < best_bic) {
      best_bic = bic;
      chosen = &r;
    }
  }
  if (chosen == nullptr) {
    std::cerr << "no sparsity level produced a feasible fit\n";
    return kExitInfeasible;
  }
  csv::write_file(join_path(cfg.out_dir, "path.csv"),
                  {"k", "objective", "bic", "converged", "iterations"}, path_rows);

  const auto& data = panel.data;
  const int M = data.n_models();
  const int P = data.n_predictors();
  const auto& sol = chosen->final_solution;

  {  // Coefficient table: one row per predictor, one column per response.
    std::vector<std::string> header = {"predictor"};
    for (int m = 0; m < M; ++m) header.push_back(data.response_names[m]);
    std::vector<std::vector<std::string>> rows;
    for (int p = 0; p < P; ++p) {
      std::vector<std::string> row = {data.predictor_names[p]};
      for (int m = 0; m < M; ++m)
        row.push_back(sol.support[p] ? csv::format(sol.betas(m, p)) : "");
      rows.push_back(std::move(row));
    }
    csv::write_file(join_path(cfg.out_dir, "coefficients.csv"), header, rows);
  }

  {  // Residual models with parameter standard errors.
    std::vector<std::vector<std::string>> rows;
    for (int m = 0; m < M; ++m) {
      const auto& fit = chosen->final_fits[m];
      const VectorXd resid =
          data.responses[m] - data.predictors[m] * sol.betas.row(m).transpose();
      VectorXd se;
      try {
        se = param_std_errors(resid, fit);
      } catch (const Error&) {
        se = VectorXd::Constant(fit.order.n_params(),
                                std::numeric_limits<double>::quiet_NaN());
      }
      auto push = [&](const std::string& name, double estimate, double stderr_) {
        rows.push_back({data.response_names[m], fit.order.str(), name,
                        csv::format(estimate),
                        std::isnan(stderr_) ? "" : csv::format(stderr_)});
      };
      int at = 0;
      for (int i = 0; i < fit.order.p; ++i) push("phi" + std::to_string(i + 1), fit.phi[i], se[at++]);
      for (int i = 0; i < fit.order.q; ++i) push("theta" + std::to_string(i + 1), fit.theta[i], se[at++]);
      for (int i = 0; i < fit.order.P; ++i) push("Phi" + std::to_string(i + 1), fit.Phi[i], se[at++]);
      for (int i = 0; i < fit.order.Q; ++i) push("Theta" + std::to_string(i + 1), fit.Theta[i], se[at++]);
      push("sigma2", fit.sigma2, std::numeric_limits<double>::quiet_NaN());
      push("loglik", fit.loglik, std::numeric_limits<double>::quiet_NaN());
      push("bic", fit.bic, std::numeric_limits<double>::quiet_NaN());
    }
    csv::write_file(join_path(cfg.out_dir, "sarima.csv"),
                    {"response", "order", "parameter", "estimate", "std_error"}, rows);
  }

  {  // ACF/PACF of the whitened residuals.
    std::vector<std::vector<std::string>> rows;
    for (int m = 0; m < M; ++m) {
      const VectorXd resid =
          data.responses[m] - data.predictors[m] * sol.betas.row(m).transpose();
      const VectorXd white = whiten(resid, chosen->final_fits[m]);
      const int lags = std::min<int>(cfg.acf_lags, static_cast<int>(white.size()) - 1);
      const auto ap = acf_pacf(white, lags);
      for (int lag = 1; lag <= lags; ++lag)
        rows.push_back({data.response_names[m], std::to_string(lag),
                        csv::format(ap.acf[lag]), csv::format(ap.pacf[lag - 1])});
      if (write_plots) {
        write_acf_svg(join_path(cfg.out_dir, "acf_" + data.response_names[m] + ".svg"),
                      ap.acf.tail(lags), 2.0 / std::sqrt(double(white.size())));
        write_acf_svg(join_path(cfg.out_dir, "pacf_" + data.response_names[m] + ".svg"),
                      ap.pacf, 2.0 / std::sqrt(double(white.size())));
      }
    }
    csv::write_file(join_path(cfg.out_dir, "residual_acf.csv"),
                    {"response", "lag", "acf", "pacf"}, rows);
  }

  std::cout << "selected k=" << chosen->k << " support:";
  for (int p = 0; p < P; ++p)
    if (sol.support[p]) std::cout << ' ' << data.predictor_names[p];
  std::cout << "\nartifacts written to " << cfg.out_dir << "\n";
  return kExitOk;
}

int run_simulate(const std::string& experiment, const Overrides& overrides,
                 const std::string& out_dir) {
  Experiment exp;
  try {
    exp = parse_experiment(experiment);
  } catch (const Error& e) {
    throw UnknownExperiment(e.what());
  }
  const ResultTable table = run_experiment(exp, overrides);
  fs::create_directories(out_dir);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows)
    rows.push_back({r.experiment, r.condition, std::to_string(r.replicate), r.method,
                    r.metric, csv::format(r.value)});
  csv::write_file(join_path(out_dir, "results.csv"),
                  {"experiment", "condition", "replicate", "method", "metric", "value"},
                  rows);

  std::vector<std::vector<std::string>> sum_rows;
  for (const auto& s : table.summarise())
    sum_rows.push_back({s.condition, s.method, s.metric, std::to_string(s.n),
                        csv::format(s.mean), csv::format(s.sd)});
  csv::write_file(join_path(out_dir, "summary.csv"),
                  {"condition", "method", "metric", "n", "mean", "sd"}, sum_rows);
  std::cout << "wrote " << table.rows.size() << " result rows to " << out_dir << "\n";
  return kExitOk;
}

int run_bench(const Overrides& overrides, const std::string& out_dir) {
  const ResultTable table = run_experiment(Experiment::EB_runtime, overrides);
  fs::create_directories(out_dir);

  std::map<std::string, std::vector<double>> times;
  for (const auto& r : table.rows)
    if (r.metric == "solve_seconds") times[r.condition].push_back(r.value);

  std::vector<std::vector<std::string>> rows;
  for (auto& [cond, vals] : times) {
    std::sort(vals.begin(), vals.end());
    const double median = vals[vals.size() / 2];
    rows.push_back({cond, std::to_string(vals.size()), csv::format(median),
                    csv::format(vals.front()), csv::format(vals.back())});
  }
  csv::write_file(join_path(out_dir, "timing.csv"),
                  {"condition", "repeats", "median_seconds", "min_seconds", "max_seconds"},
                  rows);
  std::cout << "wrote timing for " << rows.size() << " conditions to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace sbs::cli
