#include "sbs/miqo.hpp"

#include "sbs/data.hpp"
#include "sbs/gram.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace sbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<int>> conflict_adjacency(const ConstraintSet& cs) {
  const int P = cs.n_predictors;
  std::vector<std::vector<int>> adj(P);
  auto add = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (const auto& [p, s] : cs.exclusion_pairs) add(p, s);
  for (const auto& g : cs.groups)
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = i + 1; j < g.size(); ++j) add(g[i], g[j]);
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

// Max independent set by branching on the highest-degree candidate vertex.
// Only used for P <= 25, where this is instant.
struct MisSearch {
  const std::vector<std::uint64_t>& nbr;  // neighbourhood bitmasks
  int best = 0;

  void run(std::uint64_t cand, int size) {
    if (size + std::popcount(cand) <= best) return;
    if (cand == 0) {
      best = std::max(best, size);
      return;
    }
    int v = -1, vdeg = -1;
    for (std::uint64_t rest = cand; rest;) {
      const int u = std::countr_zero(rest);
      rest &= rest - 1;
      const int deg = std::popcount(nbr[u] & cand);
      if (deg > vdeg) {
        vdeg = deg;
        v = u;
      }
    }
    if (vdeg == 0) {  // remaining candidates are pairwise independent
      best = std::max(best, size + std::popcount(cand));
      return;
    }
    run(cand & ~(nbr[v] | (std::uint64_t{1} << v)), size + 1);
    run(cand & ~(std::uint64_t{1} << v), size);
  }
};

int greedy_independent(const std::vector<std::vector<int>>& adj, const IndexSet& forced,
                       int P) {
  std::vector<char> taken(P, 0), blocked(P, 0);
  int count = 0;
  auto take = [&](int p) {
    taken[p] = 1;
    ++count;
    for (int nb : adj[p]) blocked[nb] = 1;
  };
  for (int p : forced) take(p);
  for (int p = 0; p < P; ++p)
    if (!taken[p] && !blocked[p]) take(p);
  return count;
}

// Upper bound on the attainable support size, ignoring exclusion pairs and
// honouring group caps only when groups are pairwise disjoint.
int optimistic_support_bound(const ConstraintSet& cs, bool groups_disjoint) {
  const int P = cs.n_predictors;
  if (!groups_disjoint) return P;
  int bound = P;
  for (const auto& g : cs.groups)
    bound -= std::max<int>(0, static_cast<int>(g.size()) - 1);
  return bound;
}

bool groups_are_disjoint(const ConstraintSet& cs) {
  std::vector<char> seen(cs.n_predictors, 0);
  for (const auto& g : cs.groups)
    for (int p : g) {
      if (seen[p]) return false;
      seen[p] = 1;
    }
  return true;
}

struct BnbSolver {
  const PanelDataset& data;
  const ConstraintSet& cs;
  int M, P, k;
  bool equality;
  double lambda;

  std::vector<gram::Gram> models;  // on rescaled columns
  VectorXd col_scale;              // shared across models
  VectorXd pen_weight;             // 1 / scale^2
  std::vector<Sign> signs;
  std::vector<std::vector<int>> adj;
  bool disjoint_groups = true;

  enum : std::int8_t { Free = 0, In = 1, Out = 2 };
  std::vector<std::int8_t> state;
  int in_count = 0;

  double best_obj = kInf;
  std::vector<int> best_support;
  MatrixXd best_betas;   // scaled coords, over best_support
  VectorXd best_bbar;
  std::int64_t nodes = 0;

  std::optional<std::chrono::steady_clock::time_point> deadline;
  bool timed_out = false;
  double open_bound = kInf;

  BnbSolver(const PanelDataset& d, const ConstraintSet& c, int k_)
      : data(d), cs(c), M(d.n_models()), P(d.n_predictors()), k(k_),
        equality(c.equality_sparsity), lambda(c.shrink_lambda) {
    // Shared per-column scale: mean column sd across models. Scaling keeps
    // the selected support invariant and conditions the Gram matrices; the
    // objective itself is untouched (penalty re-weighted accordingly).
    col_scale = VectorXd::Zero(P);
    for (int m = 0; m < M; ++m)
      for (int p = 0; p < P; ++p) {
        const auto col = data.predictors[m].col(p);
        const double mean = col.mean();
        col_scale[p] += std::sqrt((col.array() - mean).square().sum() / col.size());
      }
    col_scale /= static_cast<double>(M);
    for (int p = 0; p < P; ++p)
      if (!(col_scale[p] > 0.0)) col_scale[p] = 1.0;
    pen_weight = col_scale.cwiseAbs2().cwiseInverse();

    models.resize(M);
    for (int m = 0; m < M; ++m) {
      MatrixXd X = data.predictors[m] * col_scale.cwiseInverse().asDiagonal();
      models[m] = gram::make(X, data.responses[m]);
    }

    signs = SignMap::from_constraints(cs, P).signs;
    adj = conflict_adjacency(cs);
    disjoint_groups = groups_are_disjoint(cs);
    state.assign(P, Free);
    if (cs.time_limit)
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(*cs.time_limit));
  }

  bool time_exceeded() {
    if (timed_out) return true;
    if (deadline && std::chrono::steady_clock::now() > *deadline) timed_out = true;
    return timed_out;
  }

  std::vector<int> active_cols() const {
    std::vector<int> cols;
    cols.reserve(P);
    for (int p = 0; p < P; ++p)
      if (state[p] != Out) cols.push_back(p);
    return cols;
  }

  std::vector<int> in_cols() const {
    std::vector<int> cols;
    for (int p = 0; p < P; ++p)
      if (state[p] == In) cols.push_back(p);
    return cols;
  }

  double evaluate(const std::vector<int>& cols, MatrixXd& b, VectorXd& bbar) const {
    return gram::solve_joint(models, cols, lambda, signs, b, bbar, 1e-9, &pen_weight);
  }

  static bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  void offer_incumbent(const std::vector<int>& support, double obj, const MatrixXd& b,
                       const VectorXd& bbar) {
    const double tie = 1e-12 * (1.0 + std::abs(obj));
    if (obj < best_obj - tie ||
        (obj <= best_obj + tie && lex_less(support, best_support))) {
      best_obj = obj;
      best_support = support;
      best_betas = b;
      best_bbar = bbar;
    }
  }

  void evaluate_and_offer(const std::vector<int>& support) {
    MatrixXd b;
    VectorXd bbar;
    const double obj = evaluate(support, b, bbar);
    offer_incumbent(support, obj, b, bbar);
  }

  // Fixes p to In and forces its conflicting free neighbours out.
  // Returns the list of predictors flipped Free -> Out for undo.
  std::vector<int> include(int p) {
    state[p] = In;
    ++in_count;
    std::vector<int> flipped;
    for (int nb : adj[p])
      if (state[nb] == Free) {
        state[nb] = Out;
        flipped.push_back(nb);
      }
    return flipped;
  }

  void undo_include(int p, const std::vector<int>& flipped) {
    state[p] = Free;
    --in_count;
    for (int nb : flipped) state[nb] = Free;
  }

  bool support_conflict_free(const std::vector<int>& cols) const {
    std::vector<char> in(P, 0);
    for (int p : cols) in[p] = 1;
    for (int p : cols)
      for (int nb : adj[p])
        if (nb > p && in[nb]) return false;
    return true;
  }

  // Upper bound on how many more predictors the free set can still supply.
  int free_capacity() const {
    int free_total = 0;
    for (int p = 0; p < P; ++p)
      if (state[p] == Free) ++free_total;
    if (!disjoint_groups) return free_total;
    int bound = free_total;
    for (const auto& g : cs.groups) {
      int free_in_g = 0;
      for (int p : g)
        if (state[p] == Free) ++free_in_g;
      bound -= std::max(0, free_in_g - 1);
    }
    return bound;
  }

  // `bound`, `betas`, `bbar` describe the relaxation fit on the node's
  // In+Free columns; the bound is valid for every completion below the node.
  void dfs(double bound, const std::vector<int>& cols, const MatrixXd& betas,
           const VectorXd& bbar) {
    ++nodes;
    if (time_exceeded()) {
      open_bound = std::min(open_bound, bound);
      return;
    }
    if (bound >= best_obj - 1e-9 * (1.0 + std::abs(best_obj))) return;

    const int n_active = static_cast<int>(cols.size());
    const int n_free = n_active - in_count;

    // The relaxation support may itself be admissible, in which case its fit
    // is optimal for the whole subtree.
    if ((equality ? n_active == k : n_active <= k) && support_conflict_free(cols)) {
      offer_incumbent(cols, bound, betas, bbar);
      return;
    }

    if (in_count == k) {
      evaluate_and_offer(in_cols());
      return;
    }
    if (n_free == 0) {
      if (!equality && in_count <= k) evaluate_and_offer(in_cols());
      return;
    }
    if (equality && in_count + free_capacity() < k) return;

    // Branch on the free predictor carrying the most weight in the bound fit.
    int pivot = -1;
    double best_score = -1.0;
    for (int a = 0; a < n_active; ++a) {
      const int p = cols[a];
      if (state[p] != Free) continue;
      const double score = betas.col(a).cwiseAbs().sum();
      if (score > best_score + 1e-15) {
        best_score = score;
        pivot = p;
      }
    }
    if (pivot < 0) return;

    // Include branch first.
    {
      const auto flipped = include(pivot);
      if (in_count == k) {
        ++nodes;
        if (!time_exceeded()) evaluate_and_offer(in_cols());
      } else if (flipped.empty()) {
        dfs(bound, cols, betas, bbar);  // same active set: bound fit carries over
      } else if (!(equality && in_count + free_capacity() < k)) {
        const auto child_cols = active_cols();
        MatrixXd b;
        VectorXd bb;
        const double child_bound = evaluate(child_cols, b, bb);
        dfs(child_bound, child_cols, b, bb);
      }
      undo_include(pivot, flipped);
    }

    // Exclude branch.
    {
      state[pivot] = Out;
      if (!(equality && in_count + free_capacity() < k)) {
        const auto child_cols = active_cols();
        MatrixXd b;
        VectorXd bb;
        const double child_bound = evaluate(child_cols, b, bb);
        dfs(child_bound, child_cols, b, bb);
      }
      state[pivot] = Free;
    }
  }

  void greedy_incumbent() {
    std::vector<int> support(cs.must_include.begin(), cs.must_include.end());
    std::vector<char> blocked(P, 0), taken(P, 0);
    for (int p : support) {
      taken[p] = 1;
      for (int nb : adj[p]) blocked[nb] = 1;
    }
    while (static_cast<int>(support.size()) < k) {
      int best_p = -1;
      double best = kInf;
      MatrixXd b;
      VectorXd bbar;
      for (int p = 0; p < P; ++p) {
        if (taken[p] || blocked[p]) continue;
        auto trial = support;
        trial.push_back(p);
        std::sort(trial.begin(), trial.end());
        const double obj = evaluate(trial, b, bbar);
        if (obj < best - 1e-15) {
          best = obj;
          best_p = p;
        }
      }
      if (best_p < 0) break;
      support.push_back(best_p);
      std::sort(support.begin(), support.end());
      taken[best_p] = 1;
      for (int nb : adj[best_p]) blocked[nb] = 1;
    }
    if (equality && static_cast<int>(support.size()) != k) return;
    if (!support.empty() || !equality) evaluate_and_offer(support);
  }

  void try_warm(const SbsSolution& warm) {
    if (warm.support.size() != static_cast<size_t>(P)) return;
    std::vector<int> support = warm.selected();
    if (static_cast<int>(support.size()) > k) return;
    for (int p : cs.must_include)
      if (!std::binary_search(support.begin(), support.end(), p)) return;
    if (!support_conflict_free(support)) return;
    if (equality && static_cast<int>(support.size()) != k) {
      // Extend greedily to meet the equality cap.
      std::vector<char> blocked(P, 0), taken(P, 0);
      for (int p : support) {
        taken[p] = 1;
        for (int nb : adj[p]) blocked[nb] = 1;
      }
      while (static_cast<int>(support.size()) < k) {
        int addp = -1;
        for (int p = 0; p < P; ++p)
          if (!taken[p] && !blocked[p]) {
            addp = p;
            break;
          }
        if (addp < 0) return;
        support.push_back(addp);
        taken[addp] = 1;
        for (int nb : adj[addp]) blocked[nb] = 1;
      }
      std::sort(support.begin(), support.end());
    }
    evaluate_and_offer(support);
  }

  SbsSolution finish() {
    SbsSolution sol;
    sol.support.assign(P, 0);
    sol.betas.setZero(M, P);
    sol.consensus.setZero(P);
    sol.nodes = nodes;
    if (best_support.empty() && !(best_obj < kInf)) {
      sol.status = timed_out ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
      sol.best_bound = timed_out ? std::min(open_bound, best_obj) : best_obj;
      return sol;
    }
    for (size_t a = 0; a < best_support.size(); ++a) {
      const int p = best_support[a];
      sol.support[p] = 1;
      // Map from rescaled coordinates back to the original column scale.
      sol.betas.col(p) = best_betas.col(static_cast<int>(a)) / col_scale[p];
      sol.consensus[p] = best_bbar[static_cast<int>(a)] / col_scale[p];
    }
    sol.objective = best_obj;
    if (timed_out) {
      sol.status = SolveStatus::TimeLimit;
      sol.best_bound = std::min(open_bound, best_obj);
    } else {
      sol.status = SolveStatus::Optimal;
      sol.best_bound = best_obj;
    }
    return sol;
  }
};

}  // namespace

SbsProblem::SbsProblem(PanelDataset d, ConstraintSet c)
    : data(validate_dataset(std::move(d))), constraints(std::move(c)) {
  constraints.validate(data.n_predictors());
}

Feasibility check_feasible(const ConstraintSet& cs) {
  Feasibility out;
  const int P = cs.n_predictors;
  const auto adj = conflict_adjacency(cs);

  if (P <= 25) {
    std::vector<std::uint64_t> nbr(P, 0);
    for (int p = 0; p < P; ++p)
      for (int nb : adj[p]) nbr[p] |= std::uint64_t{1} << nb;
    std::uint64_t cand = (P == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << P) - 1);
    int forced = 0;
    bool j_ok = !cs.infeasible_reason.has_value();
    if (j_ok) {
      for (int p : cs.must_include) {
        cand &= ~(nbr[p] | (std::uint64_t{1} << p));
        ++forced;
      }
    }
    MisSearch mis{nbr};
    mis.run(cand, 0);
    out.k_max = (j_ok ? forced : 0) + mis.best;
    if (!j_ok) {
      // Informational k_max without the conflicting must-include set.
      MisSearch all{nbr};
      all.run((P == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << P) - 1), 0);
      out.k_max = all.best;
    }
    out.k_max_exact = true;
  } else {
    out.k_max = greedy_independent(adj, cs.infeasible_reason ? IndexSet{} : cs.must_include, P);
    out.k_max_exact = false;
  }

  if (cs.infeasible_reason) {
    out.feasible = false;
    out.reason = *cs.infeasible_reason;
    return out;
  }
  if (static_cast<int>(cs.must_include.size()) > cs.sparsity_k) {
    out.feasible = false;
    out.reason = "must_include has more predictors than the sparsity budget";
    return out;
  }
  if (cs.equality_sparsity) {
    const bool over = out.k_max_exact
                          ? cs.sparsity_k > out.k_max
                          : cs.sparsity_k > optimistic_support_bound(cs, groups_are_disjoint(cs));
    if (over) {
      out.feasible = false;
      out.reason = "equality sparsity k=" + std::to_string(cs.sparsity_k) +
                   " exceeds k_max=" + std::to_string(out.k_max);
      return out;
    }
  }
  return out;
}

SbsSolution solve_sbs(const SbsProblem& problem, int k, const SbsSolution* warm) {
  const int P = problem.data.n_predictors();
  if (k < 1 || k > P)
    throw ConstraintError("sparsity k must lie in [1, P]");

  ConstraintSet cs = problem.constraints;
  cs.sparsity_k = k;
  const Feasibility feas = check_feasible(cs);
  if (!feas.feasible) {
    SbsSolution sol;
    sol.support.assign(P, 0);
    sol.betas.setZero(problem.data.n_models(), P);
    sol.consensus.setZero(P);
    sol.status = SolveStatus::Infeasible;
    return sol;
  }

  BnbSolver solver(problem.data, cs, k);
  for (int p : cs.must_include) {
    const auto flipped = solver.include(p);
    (void)flipped;  // permanent for the whole search
  }
  solver.greedy_incumbent();
  if (warm) solver.try_warm(*warm);

  const auto root_cols = solver.active_cols();
  MatrixXd b;
  VectorXd bbar;
  const double root_bound = solver.evaluate(root_cols, b, bbar);
  solver.dfs(root_bound, root_cols, b, bbar);
  return solver.finish();
}

std::vector<SbsSolution> solve_path(const SbsProblem& problem,
                                    const std::vector<int>& k_range) {
  if (!std::is_sorted(k_range.begin(), k_range.end()))
    throw ConstraintError("k_range must be sorted ascending");
  std::vector<SbsSolution> out;
  out.reserve(k_range.size());
  const SbsSolution* warm = nullptr;
  for (int k : k_range) {
    out.push_back(solve_sbs(problem, k, warm));
    if (out.back().status == SolveStatus::Optimal ||
        out.back().status == SolveStatus::TimeLimit)
      warm = &out.back();
  }
  return out;
}

std::vector<double> lambda_grid(double g_k, int n) {
  if (!(g_k > 0.0))
    throw NonPositiveObjective("lambda grid requires a positive anchor objective");
  if (n < 2) throw ConstraintError("lambda grid needs at least two points");
  std::vector<double> grid;
  grid.reserve(n);
  grid.push_back(0.0);
  const double lo = std::log(1e-4 * g_k);
  const double hi = std::log(2.0 * g_k);
  for (int i = 1; i <= n - 1; ++i)
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / (n - 1)));
  grid.back() = 2.0 * g_k;
  return grid;
}

}  // namespace sbs
