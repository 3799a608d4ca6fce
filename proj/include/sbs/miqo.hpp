#pragma once

#include "sbs/regress.hpp"
#include "sbs/types.hpp"

namespace sbs {

/// A panel plus the constraints that define the simultaneous best-subset
/// problem on it. Construction validates both parts.
struct SbsProblem {
  PanelDataset data;
  ConstraintSet constraints;

  SbsProblem(PanelDataset d, ConstraintSet c);
};

struct Feasibility {
  bool feasible = true;
  std::string reason;  // empty when feasible
  int k_max = 0;       // largest support size admitted by HC pairs and groups
  bool k_max_exact = true;  // exact search (P <= 25) vs greedy bound
};

/// Computes k_max under the exclusion and group constraints and decides
/// whether the requested sparsity (constraints.sparsity_k) is attainable.
/// Infeasibility is a return value, never an exception.
Feasibility check_feasible(const ConstraintSet& constraints);

/// Exact branch-and-bound solve of the simultaneous best-subset problem at
/// sparsity k. `warm` (typically the solution for a smaller k) seeds the
/// incumbent. Deterministic: ties in the objective go to the
/// lexicographically smallest support.
SbsSolution solve_sbs(const SbsProblem& problem, int k,
                      const SbsSolution* warm = nullptr);

/// Solves each k in ascending order, warm-starting from the previous optimum.
std::vector<SbsSolution> solve_path(const SbsProblem& problem,
                                    const std::vector<int>& k_range);

/// {0} followed by n-1 log-equally spaced values on (g_k * 1e-4, 2 g_k];
/// the largest value is exactly 2 g_k.
std::vector<double> lambda_grid(double g_k, int n);

}  // namespace sbs
