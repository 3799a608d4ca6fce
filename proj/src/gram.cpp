#include "sbs/gram.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace sbs::gram {

Gram make(const MatrixXd& X, const VectorXd& y) {
  Gram g;
  g.G.noalias() = X.transpose() * X;
  g.c.noalias() = X.transpose() * y;
  g.yty = y.squaredNorm();
  g.T = static_cast<int>(X.rows());
  return g;
}

VectorXd solve_psd_minnorm(const MatrixXd& A, const VectorXd& r) {
  const Eigen::Index n = A.rows();
  if (n == 0) return VectorXd(0);
  Eigen::LDLT<MatrixXd> ldlt(A);
  if (ldlt.info() == Eigen::Success) {
    VectorXd b = ldlt.solve(r);
    if (b.allFinite() && (A * b - r).norm() <= 1e-8 * (1.0 + r.norm())) return b;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
  return cod.solve(r);
}

VectorXd solve_signed_quadratic(const MatrixXd& A, const VectorXd& r,
                                const std::vector<Sign>& signs) {
  const int n = static_cast<int>(A.rows());
  VectorXd x = VectorXd::Zero(n);
  if (n == 0) return x;

  // Flip NonPositive entries so every constrained entry is >= 0.
  VectorXd flip = VectorXd::Ones(n);
  bool any_constrained = false;
  for (int j = 0; j < n; ++j) {
    if (signs[j] == Sign::NonPositive) flip[j] = -1.0;
    if (signs[j] != Sign::Free) any_constrained = true;
  }
  if (!any_constrained) return solve_psd_minnorm(A, r);

  const MatrixXd Af = flip.asDiagonal() * A * flip.asDiagonal();
  const VectorXd rf = flip.asDiagonal() * r;

  std::vector<char> passive(n, 0);
  std::vector<int> pidx;
  pidx.reserve(n);
  for (int j = 0; j < n; ++j)
    if (signs[j] == Sign::Free) passive[j] = 1;

  const double wtol = 1e-10 * (1.0 + rf.cwiseAbs().maxCoeff());

  auto solve_passive = [&](VectorXd& z) {
    pidx.clear();
    for (int j = 0; j < n; ++j)
      if (passive[j]) pidx.push_back(j);
    const int np = static_cast<int>(pidx.size());
    MatrixXd Ap(np, np);
    VectorXd rp(np);
    for (int a = 0; a < np; ++a) {
      rp[a] = rf[pidx[a]];
      for (int b = 0; b < np; ++b) Ap(a, b) = Af(pidx[a], pidx[b]);
    }
    const VectorXd zp = solve_psd_minnorm(Ap, rp);
    z.setZero(n);
    for (int a = 0; a < np; ++a) z[pidx[a]] = zp[a];
  };

  VectorXd z(n);
  solve_passive(z);
  // Initial passive set holds only free entries, so z is feasible.
  x = z;

  const int max_outer = 3 * n + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    const VectorXd w = rf - Af * x;
    int best = -1;
    double wmax = wtol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    if (best < 0) break;  // KKT: all pinned entries have non-positive gradient payoff
    passive[best] = 1;

    for (int inner = 0; inner <= n + 1; ++inner) {
      solve_passive(z);
      double alpha = 1.0;
      int blocker = -1;
      for (int j = 0; j < n; ++j) {
        if (!passive[j] || signs[j] == Sign::Free) continue;
        if (z[j] < 0.0) {
          const double denom = x[j] - z[j];
          const double step = denom > 0.0 ? x[j] / denom : 0.0;
          if (step < alpha) {
            alpha = step;
            blocker = j;
          }
        }
      }
      if (blocker < 0) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j) {
        if (!passive[j] || signs[j] == Sign::Free) continue;
        if (j == blocker || x[j] <= 0.0) {
          x[j] = 0.0;
          passive[j] = 0;
        }
      }
    }
  }

  for (int j = 0; j < n; ++j)
    if (signs[j] != Sign::Free && x[j] < 0.0) x[j] = 0.0;
  return flip.asDiagonal() * x;
}

namespace {

void gather(const Gram& g, const std::vector<int>& cols, MatrixXd& A, VectorXd& r) {
  const int s = static_cast<int>(cols.size());
  A.resize(s, s);
  r.resize(s);
  for (int a = 0; a < s; ++a) {
    r[a] = g.c[cols[a]];
    for (int b = 0; b < s; ++b) A(a, b) = g.G(cols[a], cols[b]);
  }
}

}  // namespace

double rss_of(const Gram& g, const std::vector<int>& cols, const VectorXd& b) {
  double quad = 0.0, lin = 0.0;
  const int s = static_cast<int>(cols.size());
  for (int a = 0; a < s; ++a) {
    lin += g.c[cols[a]] * b[a];
    for (int bb = 0; bb < s; ++bb) quad += b[a] * g.G(cols[a], cols[bb]) * b[bb];
  }
  return std::max(0.0, g.yty - 2.0 * lin + quad);
}

double solve_subset(const Gram& g, const std::vector<int>& cols, VectorXd& beta) {
  MatrixXd A;
  VectorXd r;
  gather(g, cols, A, r);
  beta = solve_psd_minnorm(A, r);
  return rss_of(g, cols, beta);
}

double solve_subset_signed(const Gram& g, const std::vector<int>& cols,
                           const std::vector<Sign>& signs, VectorXd& beta) {
  MatrixXd A;
  VectorXd r;
  gather(g, cols, A, r);
  std::vector<Sign> sub(cols.size());
  for (size_t a = 0; a < cols.size(); ++a) sub[a] = signs[cols[a]];
  beta = solve_signed_quadratic(A, r, sub);
  return rss_of(g, cols, beta);
}

double solve_joint(const std::vector<Gram>& models, const std::vector<int>& cols,
                   double lambda, const std::vector<Sign>& signs, MatrixXd& betas,
                   VectorXd& bbar, double tol, const VectorXd* col_weights) {
  const int M = static_cast<int>(models.size());
  const int s = static_cast<int>(cols.size());
  betas.setZero(M, s);
  bbar.setZero(s);

  std::vector<Sign> sub(s);
  VectorXd w = VectorXd::Ones(s);
  for (int a = 0; a < s; ++a) {
    sub[a] = signs[cols[a]];
    if (col_weights) w[a] = (*col_weights)[cols[a]];
  }

  std::vector<MatrixXd> A(M);
  std::vector<VectorXd> r(M);
  for (int m = 0; m < M; ++m) gather(models[m], cols, A[m], r[m]);

  if (lambda == 0.0) {
    for (int m = 0; m < M; ++m)
      betas.row(m) = solve_signed_quadratic(A[m], r[m], sub).transpose();
    if (M > 0 && s > 0) bbar = betas.colwise().mean().transpose();
    double obj = 0.0;
    for (int m = 0; m < M; ++m)
      obj += rss_of(models[m], cols, betas.row(m).transpose());
    return obj;
  }

  MatrixXd Ap;
  const int max_sweeps = 2000;
  for (int sweep = 0; sweep < max_sweeps && s > 0; ++sweep) {
    double change = 0.0;
    for (int m = 0; m < M; ++m) {
      Ap = A[m];
      Ap.diagonal() += lambda * w;
      const VectorXd rp = r[m] + lambda * w.cwiseProduct(bbar);
      const VectorXd bm = solve_signed_quadratic(Ap, rp, sub);
      change = std::max(change, (bm - betas.row(m).transpose()).cwiseAbs().maxCoeff());
      betas.row(m) = bm.transpose();
    }
    const VectorXd nb = betas.colwise().mean().transpose();
    change = std::max(change, (nb - bbar).cwiseAbs().maxCoeff());
    bbar = nb;
    if (change < tol) break;
  }

  double obj = 0.0;
  for (int m = 0; m < M; ++m) {
    obj += rss_of(models[m], cols, betas.row(m).transpose());
    obj += lambda * (betas.row(m).transpose() - bbar).cwiseAbs2().dot(w);
  }
  return obj;
}

}  // namespace sbs::gram
