#include "sbs/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

namespace sbs {

namespace {

std::string at(int m, int t, int p) {
  std::ostringstream os;
  os << "model " << m << ", row " << t << ", column " << p;
  return os.str();
}

}  // namespace

PanelDataset validate_dataset(PanelDataset raw) {
  const int M = raw.n_models();
  if (M == 0) throw DimensionMismatch("dataset has no responses");
  if (static_cast<int>(raw.predictors.size()) != M)
    throw DimensionMismatch("number of predictor matrices differs from number of responses");

  const int T = static_cast<int>(raw.responses[0].size());
  const int P = static_cast<int>(raw.predictors[0].cols());
  if (static_cast<int>(raw.predictor_names.size()) != P)
    throw DimensionMismatch("predictor_names length differs from predictor columns");
  if (!raw.response_names.empty() && static_cast<int>(raw.response_names.size()) != M)
    throw DimensionMismatch("response_names length differs from number of responses");

  for (int m = 0; m < M; ++m) {
    if (static_cast<int>(raw.responses[m].size()) != T)
      throw DimensionMismatch("response " + std::to_string(m) + " has length " +
                              std::to_string(raw.responses[m].size()) + ", expected " +
                              std::to_string(T));
    if (raw.predictors[m].rows() != T || raw.predictors[m].cols() != P)
      throw DimensionMismatch("predictor matrix " + std::to_string(m) + " is " +
                              std::to_string(raw.predictors[m].rows()) + "x" +
                              std::to_string(raw.predictors[m].cols()) + ", expected " +
                              std::to_string(T) + "x" + std::to_string(P));
  }

  for (int m = 0; m < M; ++m) {
    for (int t = 0; t < T; ++t)
      if (!std::isfinite(raw.responses[m][t]))
        throw NonFiniteValue("non-finite response value at " + at(m, t, -1));
    for (int p = 0; p < P; ++p)
      for (int t = 0; t < T; ++t)
        if (!std::isfinite(raw.predictors[m](t, p)))
          throw NonFiniteValue("non-finite predictor value at " + at(m, t, p));
  }

  std::unordered_set<std::string> seen;
  for (const auto& name : raw.predictor_names)
    if (!seen.insert(name).second)
      throw DuplicateName("duplicate predictor name '" + name + "'");

  for (int m = 0; m < M; ++m)
    for (int p = 0; p < P; ++p) {
      const auto col = raw.predictors[m].col(p);
      const double mean = col.mean();
      if ((col.array() - mean).abs().maxCoeff() == 0.0)
        throw ZeroVariance("predictor column " + std::to_string(p) + " (" +
                           raw.predictor_names[p] + ") is constant in model " +
                           std::to_string(m));
    }

  return raw;
}

std::vector<IndexPair> build_hc_set(const PanelDataset& data, double rho) {
  if (rho < 0.0 || rho >= 1.0)
    throw ConstraintError("correlation threshold must lie in [0, 1)");
  const int M = data.n_models();
  const int P = data.n_predictors();
  const int T = data.n_obs();

  std::set<IndexPair> pairs;
  for (int m = 0; m < M; ++m) {
    MatrixXd centered = data.predictors[m];
    centered.rowwise() -= centered.colwise().mean();
    VectorXd norm(P);
    for (int p = 0; p < P; ++p) {
      norm[p] = centered.col(p).norm();
      if (norm[p] == 0.0)
        throw ZeroVariance("predictor column " + std::to_string(p) +
                           " has zero variance in model " + std::to_string(m));
    }
    (void)T;
    for (int p = 0; p < P; ++p)
      for (int s = p + 1; s < P; ++s) {
        const double corr = centered.col(p).dot(centered.col(s)) / (norm[p] * norm[s]);
        if (corr > rho) pairs.insert({p, s});
      }
  }
  return {pairs.begin(), pairs.end()};
}

VectorXd exp_smooth(const VectorXd& series, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw AlphaOutOfRange("smoothing parameter must lie in (0, 1], got " +
                          std::to_string(alpha));
  if (series.size() == 0) throw SeriesTooShort("cannot smooth an empty series");
  VectorXd out(series.size());
  out[0] = series[0];
  for (Eigen::Index t = 1; t < series.size(); ++t)
    out[t] = alpha * series[t] + (1.0 - alpha) * out[t - 1];
  return out;
}

std::pair<PanelDataset, IndexSet> expand_transform_grid(
    const PanelDataset& data, int base_predictor, const std::vector<double>& alphas) {
  if (alphas.empty()) throw ConstraintError("alphas must be non-empty");
  if (base_predictor < 0 || base_predictor >= data.n_predictors())
    throw ConstraintError("base predictor index out of range");

  const int M = data.n_models();
  const int P = data.n_predictors();
  const int extra = static_cast<int>(alphas.size());

  PanelDataset out = data;
  for (int m = 0; m < M; ++m) {
    MatrixXd widened(data.n_obs(), P + extra);
    widened.leftCols(P) = data.predictors[m];
    for (int a = 0; a < extra; ++a)
      widened.col(P + a) = exp_smooth(data.predictors[m].col(base_predictor), alphas[a]);
    out.predictors[m] = std::move(widened);
  }
  for (int a = 0; a < extra; ++a) {
    std::ostringstream name;
    name << data.predictor_names[base_predictor] << "_sm" << alphas[a];
    out.predictor_names.push_back(name.str());
  }

  IndexSet group(extra);
  for (int a = 0; a < extra; ++a) group[a] = P + a;
  return {std::move(out), std::move(group)};
}

void ConstraintSet::validate(int P) {
  n_predictors = P;
  infeasible_reason.reset();

  auto check_index = [&](int p, const char* what) {
    if (p < 0 || p >= P)
      throw ConstraintError(std::string(what) + " index " + std::to_string(p) +
                            " out of range for P=" + std::to_string(P));
  };

  if (sparsity_k < 1) throw ConstraintError("sparsity_k must be positive");
  if (shrink_lambda < 0.0) throw ConstraintError("shrink_lambda must be >= 0");
  if (corr_threshold && (*corr_threshold < 0.0 || *corr_threshold >= 1.0))
    throw ConstraintError("corr_threshold must lie in [0, 1)");
  if (time_limit && *time_limit <= 0.0)
    throw ConstraintError("time_limit must be positive");

  auto sort_unique = [](IndexSet& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(must_include);
  sort_unique(positive_signs);
  sort_unique(negative_signs);

  for (int p : must_include) check_index(p, "must_include");
  for (int p : positive_signs) check_index(p, "positive_signs");
  for (int p : negative_signs) check_index(p, "negative_signs");
  for (auto& g : groups) {
    sort_unique(g);
    for (int p : g) check_index(p, "group");
  }
  for (auto& [p, s] : exclusion_pairs) {
    check_index(p, "exclusion pair");
    check_index(s, "exclusion pair");
    if (p == s) throw ConstraintError("exclusion pair with identical indices");
    if (p > s) std::swap(p, s);
  }
  std::sort(exclusion_pairs.begin(), exclusion_pairs.end());
  exclusion_pairs.erase(std::unique(exclusion_pairs.begin(), exclusion_pairs.end()),
                        exclusion_pairs.end());

  for (int p : positive_signs)
    if (std::binary_search(negative_signs.begin(), negative_signs.end(), p))
      throw ConstraintError("predictor " + std::to_string(p) +
                            " appears in both sign sets");

  // Must-include conflicts make the whole set infeasible; record, don't throw.
  for (const auto& [p, s] : exclusion_pairs)
    if (std::binary_search(must_include.begin(), must_include.end(), p) &&
        std::binary_search(must_include.begin(), must_include.end(), s)) {
      infeasible_reason = "must_include contains excluded pair (" +
                          std::to_string(p) + "," + std::to_string(s) + ")";
      return;
    }
  for (const auto& g : groups) {
    int hits = 0;
    for (int p : g)
      if (std::binary_search(must_include.begin(), must_include.end(), p)) ++hits;
    if (hits > 1) {
      infeasible_reason = "must_include contains two members of one transformation group";
      return;
    }
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

}  // namespace sbs
