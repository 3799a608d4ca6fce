#include "sbs/cli.hpp"
#include "sbs/config.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous best-subset selection for systems of regressions"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a panel described by a config file");
  std::string config_path, fit_out, fit_seed;
  double fit_time_limit = 0.0;
  bool plots = false;
  fit->add_option("--config", config_path, "key=value config file")->required();
  fit->add_option("--out", fit_out, "output directory (overrides the config)");
  fit->add_option("--seed", fit_seed, "seed (overrides the config)");
  fit->add_option("--time-limit", fit_time_limit, "solver time limit in seconds");
  fit->add_flag("--plots", plots, "also write ACF/PACF svg files");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a named experiment");
  std::string experiment, sim_out = "sim_out";
  sbs::Overrides ov;
  int sim_n = -1, sim_T = -1, sim_threads = -1, sim_lambda_n = -1, sim_nt = -1,
      sim_repeats = -1;
  long long sim_seed = -1;
  double sim_rho = -1.0, sim_sigma2 = -1.0;
  std::string m_grid, p_grid, rho_grid;
  sim->add_option("experiment", experiment,
                  "E1_corr | E2_shrink | E3_serial | E4_compare | EB_runtime")
      ->required();
  sim->add_option("--n", sim_n, "replicates");
  sim->add_option("--T", sim_T, "observations per series");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--rho", sim_rho, "predictor correlation");
  sim->add_option("--sigma2", sim_sigma2, "residual variance");
  sim->add_option("--rho-grid", rho_grid, "comma separated correlation grid");
  sim->add_option("--m-grid", m_grid, "comma separated M grid");
  sim->add_option("--p-grid", p_grid, "comma separated P grid");
  sim->add_option("--lambda-n", sim_lambda_n, "shrinkage grid size");
  sim->add_option("--n-t", sim_nt, "SVS path grid size");
  sim->add_option("--repeats", sim_repeats, "timing repeats");
  sim->add_option("--threads", sim_threads, "replicate parallelism");
  sim->add_option("--out", sim_out, "output directory");

  // bench
  auto* bench = app.add_subcommand("bench", "Solver runtime scaling benchmark");
  std::string bench_out = "bench_out", bench_m_grid, bench_p_grid;
  int bench_repeats = -1, bench_T = -1, bench_threads = -1;
  long long bench_seed = -1;
  bench->add_option("--m-grid", bench_m_grid, "comma separated M grid");
  bench->add_option("--p-grid", bench_p_grid, "comma separated P grid");
  bench->add_option("--repeats", bench_repeats, "repeats per condition");
  bench->add_option("--T", bench_T, "observations per series");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--threads", bench_threads, "replicate parallelism");
  bench->add_option("--out", bench_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      sbs::RunConfig cfg = sbs::parse_config(config_path);
      if (!fit_out.empty()) cfg.out_dir = fit_out;
      if (!fit_seed.empty()) cfg.seed = std::stoull(fit_seed);
      if (fit_time_limit > 0.0) cfg.time_limit = fit_time_limit;
      return sbs::cli::run_fit(cfg, plots);
    }
    if (*sim) {
      if (sim_n >= 0) ov.n_reps = sim_n;
      if (sim_T >= 0) ov.T = sim_T;
      if (sim_seed >= 0) ov.seed = static_cast<std::uint64_t>(sim_seed);
      if (sim_rho >= 0.0) ov.rho = sim_rho;
      if (sim_sigma2 >= 0.0) ov.sigma2 = sim_sigma2;
      if (!rho_grid.empty()) ov.rho_grid = parse_double_list(rho_grid);
      if (!m_grid.empty()) ov.m_grid = parse_int_list(m_grid);
      if (!p_grid.empty()) ov.p_grid = parse_int_list(p_grid);
      if (sim_lambda_n >= 0) ov.lambda_n = sim_lambda_n;
      if (sim_nt >= 0) ov.n_t = sim_nt;
      if (sim_repeats >= 0) ov.repeats = sim_repeats;
      if (sim_threads >= 0) ov.threads = sim_threads;
      return sbs::cli::run_simulate(experiment, ov, sim_out);
    }
    if (*bench) {
      sbs::Overrides bov;
      if (!bench_m_grid.empty()) bov.m_grid = parse_int_list(bench_m_grid);
      if (!bench_p_grid.empty()) bov.p_grid = parse_int_list(bench_p_grid);
      if (bench_repeats >= 0) bov.repeats = bench_repeats;
      if (bench_T >= 0) bov.T = bench_T;
      if (bench_seed >= 0) bov.seed = static_cast<std::uint64_t>(bench_seed);
      if (bench_threads >= 0) bov.threads = bench_threads;
      return sbs::cli::run_bench(bov, bench_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sbs::cli::kExitError;
  }
  return sbs::cli::kExitError;
}
