#pragma once

#include "sbs/regress.hpp"
#include "sbs/rng.hpp"
#include "sbs/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

// Test-only oracles, deliberately independent of the library's solve paths.
namespace testutil {

using sbs::IndexSet;
using sbs::MatrixXd;
using sbs::PanelDataset;
using sbs::VectorXd;

inline MatrixXd random_matrix(sbs::Philox& rng, int rows, int cols) {
  MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = rng.normal();
  return out;
}

inline VectorXd random_vector(sbs::Philox& rng, int n) {
  VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = rng.normal();
  return out;
}

inline PanelDataset random_panel(sbs::Philox& rng, int M, int T, int P) {
  PanelDataset d;
  for (int m = 0; m < M; ++m) {
    d.predictors.push_back(random_matrix(rng, T, P));
    d.responses.push_back(random_vector(rng, T));
  }
  for (int p = 0; p < P; ++p) d.predictor_names.push_back("x" + std::to_string(p));
  for (int m = 0; m < M; ++m) d.response_names.push_back("y" + std::to_string(m));
  return d;
}

// Plain Gaussian elimination with partial pivoting on the normal equations.
inline VectorXd elimination_ols(const MatrixXd& X, const VectorXd& y) {
  const int n = static_cast<int>(X.cols());
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < X.rows(); ++t) A[i][j] += X(t, i) * X(t, j);
    for (int t = 0; t < X.rows(); ++t) A[i][n] += X(t, i) * y[t];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[piv], A[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || A[col][col] == 0.0) continue;
      const double f = A[r][col] / A[col][col];
      for (int c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
    }
  }
  VectorXd beta(n);
  for (int i = 0; i < n; ++i) beta[i] = A[i][i] != 0.0 ? A[i][n] / A[i][i] : 0.0;
  return beta;
}

// Direct evaluation of the joint penalized objective at given coefficients.
inline double joint_objective_at(const PanelDataset& data, double lambda,
                                 const MatrixXd& betas, const VectorXd& consensus) {
  double obj = 0.0;
  for (int m = 0; m < data.n_models(); ++m) {
    obj += (data.responses[m] - data.predictors[m] * betas.row(m).transpose())
               .squaredNorm();
    obj += lambda * (consensus - betas.row(m).transpose()).squaredNorm();
  }
  return obj;
}

// Feasibility of a support under a constraint set, checked from first
// principles (no shared code with the solver).
inline bool support_feasible(const IndexSet& support, const sbs::ConstraintSet& cs,
                             int k) {
  if (cs.equality_sparsity ? static_cast<int>(support.size()) != k
                           : static_cast<int>(support.size()) > k)
    return false;
  auto has = [&](int p) {
    return std::find(support.begin(), support.end(), p) != support.end();
  };
  for (int p : cs.must_include)
    if (!has(p)) return false;
  for (const auto& [p, s] : cs.exclusion_pairs)
    if (has(p) && has(s)) return false;
  for (const auto& g : cs.groups) {
    int count = 0;
    for (int p : g)
      if (has(p)) ++count;
    if (count > 1) return false;
  }
  return true;
}

struct EnumBest {
  double objective = std::numeric_limits<double>::infinity();
  IndexSet support;
  bool found = false;
};

// Exhaustive enumeration over all feasible supports of size <= (or ==) k,
// each evaluated through the public penalized least-squares contract.
inline EnumBest enumerate_sbs(const PanelDataset& data, const sbs::ConstraintSet& cs,
                              int k) {
  const int P = data.n_predictors();
  const sbs::SignMap signs = sbs::SignMap::from_constraints(cs, P);
  EnumBest best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << P); ++mask) {
    IndexSet support;
    for (int p = 0; p < P; ++p)
      if (mask & (std::uint64_t{1} << p)) support.push_back(p);
    if (!support_feasible(support, cs, k)) continue;
    const auto fit = sbs::joint_penalized_ls(data, support, cs.shrink_lambda, signs);
    if (fit.objective < best.objective - 1e-12) {
      best.objective = fit.objective;
      best.support = support;
      best.found = true;
    }
  }
  return best;
}

}  // namespace testutil
