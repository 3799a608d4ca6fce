#pragma once

#include "sbs/types.hpp"

#include <vector>

// Normal-equation kernels shared by the least-squares front ends and the
// branch-and-bound solver. Everything here works on P x P Gram matrices so a
// solve costs O(|subset|^3) regardless of T.
namespace sbs::gram {

struct Gram {
  MatrixXd G;   // X'X
  VectorXd c;   // X'y
  double yty = 0.0;
  int T = 0;
};

Gram make(const MatrixXd& X, const VectorXd& y);

/// Minimum-norm solution of the consistent PSD system A b = r.
VectorXd solve_psd_minnorm(const MatrixXd& A, const VectorXd& r);

/// KKT point of min_b b'Ab - 2 r'b subject to per-entry sign constraints,
/// by a Lawson-Hanson style active-set iteration (free entries stay passive).
VectorXd solve_signed_quadratic(const MatrixXd& A, const VectorXd& r,
                                const std::vector<Sign>& signs);

/// RSS of coefficients b on the data behind `g`, restricted to `cols`.
double rss_of(const Gram& g, const std::vector<int>& cols, const VectorXd& b);

/// Unconstrained minimum-norm LS on a column subset; returns RSS.
double solve_subset(const Gram& g, const std::vector<int>& cols, VectorXd& beta);

/// Sign-constrained LS on a column subset; `signs` indexed by original column.
double solve_subset_signed(const Gram& g, const std::vector<int>& cols,
                           const std::vector<Sign>& signs, VectorXd& beta);

/// Jointly penalized sign-constrained fit across M models sharing `cols`:
/// min sum_m rss_m + lambda * sum_m sum_a w_a (b_{m,a} - bbar_a)^2, bbar free.
/// Solved by block alternation (bbar = cross-model mean) to `tol`; a null
/// `col_weights` means unit weights. The weights let a caller work on
/// rescaled columns while keeping the penalty defined on the original scale.
/// Returns the objective; betas is M x |cols|, bbar has length |cols|.
double solve_joint(const std::vector<Gram>& models, const std::vector<int>& cols,
                   double lambda, const std::vector<Sign>& signs, MatrixXd& betas,
                   VectorXd& bbar, double tol = 1e-9,
                   const VectorXd* col_weights = nullptr);

}  // namespace sbs::gram
