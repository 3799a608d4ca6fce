#include "sbs/regress.hpp"

#include "sbs/gram.hpp"

#include <Eigen/QR>

#include <algorithm>

namespace sbs {

SignMap SignMap::from_constraints(const ConstraintSet& cs, int P) {
  SignMap m = free_map(P);
  for (int p : cs.positive_signs) m.signs[p] = Sign::NonNegative;
  for (int p : cs.negative_signs) m.signs[p] = Sign::NonPositive;
  return m;
}

LsFit ols(const MatrixXd& X, const VectorXd& y) {
  if (X.rows() != y.size())
    throw DimensionMismatch("design matrix rows differ from response length");
  LsFit fit;
  if (X.cols() == 0) {
    fit.beta = VectorXd(0);
    fit.rss = y.squaredNorm();
    return fit;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(X);
  fit.beta = cod.solve(y);
  fit.rss = (y - X * fit.beta).squaredNorm();
  return fit;
}

LsFit sign_constrained_ls(const MatrixXd& X, const VectorXd& y, const SignMap& signs) {
  if (X.rows() != y.size())
    throw DimensionMismatch("design matrix rows differ from response length");
  if (signs.size() != X.cols())
    throw DimensionMismatch("sign map length differs from predictor count");
  const auto g = gram::make(X, y);
  LsFit fit;
  fit.beta = gram::solve_signed_quadratic(g.G, g.c, signs.signs);
  fit.rss = (y - X * fit.beta).squaredNorm();
  return fit;
}

JointFit joint_penalized_ls(const PanelDataset& data, const IndexSet& support,
                            double lambda, const SignMap& signs) {
  const int M = data.n_models();
  const int P = data.n_predictors();
  if (signs.size() != P)
    throw DimensionMismatch("sign map length differs from predictor count");

  std::vector<gram::Gram> models(M);
  for (int m = 0; m < M; ++m)
    models[m] = gram::make(data.predictors[m], data.responses[m]);

  std::vector<int> cols(support.begin(), support.end());
  MatrixXd b;
  VectorXd bbar;
  JointFit fit;
  fit.objective = gram::solve_joint(models, cols, lambda, signs.signs, b, bbar);
  fit.betas.setZero(M, P);
  fit.consensus.setZero(P);
  for (size_t a = 0; a < cols.size(); ++a) {
    fit.betas.col(cols[a]) = b.col(static_cast<int>(a));
    fit.consensus[cols[a]] = bbar[static_cast<int>(a)];
  }
  return fit;
}

}  // namespace sbs
