#include "sbs/sps2.hpp"

#include <algorithm>
#include <cmath>

namespace sbs {

bool has_converged(const Sps2Iteration& prev, const Sps2Iteration& curr,
                   double beta_tol) {
  if (prev.support != curr.support) return false;
  if (prev.orders.size() != curr.orders.size()) return false;
  for (size_t m = 0; m < prev.orders.size(); ++m)
    if (!(prev.orders[m] == curr.orders[m])) return false;
  if (prev.betas.rows() != curr.betas.rows() || prev.betas.cols() != curr.betas.cols())
    return false;
  return (prev.betas - curr.betas).cwiseAbs().maxCoeff() < beta_tol;
}

Sps2Result run_sps2_single(const PanelDataset& data, const Sps2Config& cfg, int k) {
  if (cfg.candidate_orders.empty())
    throw ConstraintError("SPS2 needs a non-empty SARIMA candidate list");
  if (cfg.maxiter < 1) throw ConstraintError("maxiter must be >= 1");

  const int M = data.n_models();
  Sps2Result result;
  result.k = k;

  SbsProblem problem(data, cfg.constraints);
  SbsSolution current = solve_sbs(problem, k);
  if (current.status == SolveStatus::Infeasible) {
    result.final_solution = current;
    return result;
  }
  result.iterations.push_back(
      {current.support, current.betas, {}, current.objective});

  std::vector<SarimaFit> fits;
  for (int it = 1; it <= cfg.maxiter; ++it) {
    // Residuals come from the original panel with the current coefficients.
    fits.clear();
    fits.reserve(M);
    std::vector<SarimaOrder> orders;
    for (int m = 0; m < M; ++m) {
      const VectorXd resid =
          data.responses[m] - data.predictors[m] * current.betas.row(m).transpose();
      fits.push_back(select_sarima(resid, cfg.candidate_orders, cfg.criterion));
      orders.push_back(fits.back().order);
    }

    const PanelDataset filtered = filter_panel(data, fits);
    SbsProblem filtered_problem(filtered, cfg.constraints);
    current = solve_sbs(filtered_problem, k, &current);
    if (current.status == SolveStatus::Infeasible) break;

    result.iterations.push_back(
        {current.support, current.betas, std::move(orders), current.objective});
    result.iterations_used = it;
    result.final_solution = current;
    result.final_fits = fits;

    const auto& prev = result.iterations[result.iterations.size() - 2];
    const auto& curr = result.iterations.back();
    if (has_converged(prev, curr, cfg.beta_tol)) {
      result.converged = true;
      break;
    }
  }
  if (result.final_fits.empty()) {
    result.final_solution = current;
    result.final_fits = fits;
  }
  return result;
}

std::vector<Sps2Result> run_sps2(const PanelDataset& data, const Sps2Config& cfg) {
  std::vector<int> ks = cfg.k_range;
  if (ks.empty()) ks.push_back(cfg.constraints.sparsity_k);
  std::sort(ks.begin(), ks.end());
  std::vector<Sps2Result> out;
  out.reserve(ks.size());
  for (int k : ks) out.push_back(run_sps2_single(data, cfg, k));
  return out;
}

}  // namespace sbs
