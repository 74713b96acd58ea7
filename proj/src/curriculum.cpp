#include "seqcurl/curriculum.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "seqcurl/eval.hpp"
#include "seqcurl/parallel.hpp"
#include "seqcurl/random.hpp"

namespace seqcurl {

Curriculum Curriculum::single_sequence(std::vector<std::size_t> order) {
  Curriculum c;
  c.transfer_sources.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    c.transfer_sources.push_back(i == 0 ? std::nullopt : std::optional(order[i - 1]));
  }
  c.order = std::move(order);
  return c;
}

std::size_t Curriculum::subsequence_count() const {
  return static_cast<std::size_t>(
      std::count(transfer_sources.begin(), transfer_sources.end(), std::nullopt));
}

void Curriculum::validate(std::size_t n) const {
  if (order.size() != n) {
    throw InputError("curriculum covers " + std::to_string(order.size()) + " tasks, expected " +
                     std::to_string(n));
  }
  if (transfer_sources.size() != n) throw InputError("curriculum transfer_sources length mismatch");
  std::vector<int> position(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || position[order[i]] != -1) {
      throw InputError("curriculum order is not a permutation");
    }
    position[order[i]] = static_cast<int>(i);
  }
  std::vector<bool> used_as_source(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = transfer_sources[i];
    if (!s) continue;
    if (i == 0) throw InputError("the first task cannot have a transfer source");
    if (*s >= n || position[*s] >= static_cast<int>(i)) {
      throw InputError("transfer source must be a task solved earlier");
    }
    if (used_as_source[*s]) throw InputError("a task can seed at most one successor");
    used_as_source[*s] = true;
  }
}

namespace {

enum class Direction { Minimize, Maximize };

bool better(double candidate, double incumbent, Direction dir) {
  return dir == Direction::Minimize ? candidate < incumbent : candidate > incumbent;
}

struct Candidate {
  SolveResult solve;
  double score = 0.0;
};

// Solves every unused task against one prototype; independent solves may run
// concurrently, the selection happens afterwards.
std::vector<Candidate> solve_candidates(std::span<const TaskDataset> datasets,
                                        std::span<const std::size_t> tasks,
                                        const WeightVector& prototype, double m_bar,
                                        const SolverConfig& solver_cfg,
                                        const BoundConfig& bound_cfg) {
  std::vector<Candidate> out(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t c) {
    const TaskDataset& data = datasets[tasks[c]];
    out[c].solve = train_adaptive_svm(data, prototype, solver_cfg);
    out[c].score = task_score(out[c].solve.weight, prototype, data, m_bar, bound_cfg);
  });
  return out;
}

void check_inputs(std::span<const TaskDataset> datasets, const SolverConfig& solver_cfg,
                  const BoundConfig& bound_cfg) {
  if (datasets.empty()) throw InputError("need at least one task");
  require_dimension(datasets, datasets.front().dim());
  solver_cfg.validate();
  bound_cfg.validate();
}

CurriculumResult greedy_chain(std::span<const TaskDataset> datasets,
                              const SolverConfig& solver_cfg, const BoundConfig& bound_cfg,
                              Direction dir) {
  check_inputs(datasets, solver_cfg, bound_cfg);
  const std::size_t n = datasets.size();
  const double m_bar = harmonic_mean(datasets);

  CurriculumResult r;
  r.weights.assign(n, WeightVector(datasets.front().dim()));
  std::vector<std::size_t> unused(n);
  std::iota(unused.begin(), unused.end(), std::size_t{0});
  WeightVector prototype(datasets.front().dim());
  std::optional<std::size_t> previous;

  for (std::size_t step = 0; step < n; ++step) {
    auto candidates = solve_candidates(datasets, unused, prototype, m_bar, solver_cfg, bound_cfg);
    r.solves += candidates.size();
    std::size_t best = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      r.converged = r.converged && candidates[c].solve.converged;
      if (c > 0 && better(candidates[c].score, candidates[best].score, dir)) best = c;
    }
    const std::size_t task = unused[best];
    r.curriculum.order.push_back(task);
    r.curriculum.transfer_sources.push_back(previous);
    r.scores.push_back(candidates[best].score);
    r.weights[task] = std::move(candidates[best].solve.weight);
    prototype = r.weights[task];
    previous = task;
    unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(best));
  }
  r.bound = bound_rhs(r.weights, r.curriculum, datasets, bound_cfg);
  return r;
}

}  // namespace

CurriculumResult seqmt(std::span<const TaskDataset> datasets, const SolverConfig& solver_cfg,
                       const BoundConfig& bound_cfg) {
  return greedy_chain(datasets, solver_cfg, bound_cfg, Direction::Minimize);
}

CurriculumResult diversity_order(std::span<const TaskDataset> datasets,
                                 const SolverConfig& solver_cfg, const BoundConfig& bound_cfg) {
  return greedy_chain(datasets, solver_cfg, bound_cfg, Direction::Maximize);
}

CurriculumResult multi_seqmt(std::span<const TaskDataset> datasets,
                             const SolverConfig& solver_cfg, const BoundConfig& bound_cfg) {
  check_inputs(datasets, solver_cfg, bound_cfg);
  const std::size_t n = datasets.size();
  const std::size_t d = datasets.front().dim();
  const double m_bar = harmonic_mean(datasets);
  const WeightVector zero(d);

  CurriculumResult r;
  // With one task there is no restart flag to choose, so the plain bound applies.
  r.curriculum.multi_subsequence = n > 1;
  r.weights.assign(n, zero);

  // Pool of open subsequence ends; nullopt is the zero prototype, which is
  // never consumed. Insertion order is kept so ties resolve deterministically.
  std::vector<std::optional<std::size_t>> pool{std::nullopt};
  std::vector<bool> used(n, false);
  // Solves are cached per (prototype, task); slot n stands for the zero prototype.
  std::vector<std::optional<Candidate>> cache((n + 1) * n);
  auto slot = [n](const std::optional<std::size_t>& source, std::size_t task) {
    return (source ? *source : n) * n + task;
  };

  for (std::size_t step = 0; step < n; ++step) {
    struct Pending {
      std::size_t pool_index;
      std::size_t task;
    };
    std::vector<Pending> pending;
    for (std::size_t p = 0; p < pool.size(); ++p) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!used[k] && !cache[slot(pool[p], k)]) pending.push_back({p, k});
      }
    }
    parallel_for(pending.size(), [&](std::size_t i) {
      const auto& source = pool[pending[i].pool_index];
      const WeightVector& prototype = source ? r.weights[*source] : zero;
      const TaskDataset& data = datasets[pending[i].task];
      Candidate c;
      c.solve = train_adaptive_svm(data, prototype, solver_cfg);
      c.score = task_score(c.solve.weight, prototype, data, m_bar, bound_cfg);
      cache[slot(source, pending[i].task)] = std::move(c);
    });
    r.solves += pending.size();
    for (const auto& p : pending) {
      r.converged = r.converged && cache[slot(pool[p.pool_index], p.task)]->solve.converged;
    }

    // Order: score, then task index, then pool position.
    std::optional<std::size_t> best_pool;
    std::size_t best_task = 0;
    double best_score = 0.0;
    for (std::size_t p = 0; p < pool.size(); ++p) {
      for (std::size_t k = 0; k < n; ++k) {
        if (used[k]) continue;
        const double s = cache[slot(pool[p], k)]->score;
        if (!best_pool || s < best_score || (s == best_score && k < best_task)) {
          best_pool = p;
          best_task = k;
          best_score = s;
        }
      }
    }

    const std::optional<std::size_t> source = pool[*best_pool];
    r.curriculum.order.push_back(best_task);
    r.curriculum.transfer_sources.push_back(source);
    r.scores.push_back(best_score);
    r.weights[best_task] = cache[slot(source, best_task)]->solve.weight;
    used[best_task] = true;
    if (source) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*best_pool));
    pool.push_back(best_task);
  }
  r.bound = bound_rhs(r.weights, r.curriculum, datasets, bound_cfg);
  return r;
}

CurriculumResult train_curriculum(std::span<const TaskDataset> datasets,
                                  const Curriculum& curriculum, const SolverConfig& solver_cfg,
                                  const BoundConfig& bound_cfg) {
  check_inputs(datasets, solver_cfg, bound_cfg);
  const std::size_t n = datasets.size();
  curriculum.validate(n);
  const double m_bar = harmonic_mean(datasets);
  const WeightVector zero(datasets.front().dim());

  CurriculumResult r;
  r.curriculum = curriculum;
  r.weights.assign(n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t task = curriculum.order[i];
    const auto& source = curriculum.transfer_sources[i];
    const WeightVector& prototype = source ? r.weights[*source] : zero;
    SolveResult s = train_adaptive_svm(datasets[task], prototype, solver_cfg);
    ++r.solves;
    r.converged = r.converged && s.converged;
    r.scores.push_back(task_score(s.weight, prototype, datasets[task], m_bar, bound_cfg));
    r.weights[task] = std::move(s.weight);
  }
  r.bound = bound_rhs(r.weights, r.curriculum, datasets, bound_cfg);
  return r;
}

CurriculumResult fixed_order(std::span<const TaskDataset> datasets,
                             std::span<const std::size_t> order, const SolverConfig& solver_cfg,
                             const BoundConfig& bound_cfg) {
  return train_curriculum(
      datasets, Curriculum::single_sequence(std::vector<std::size_t>(order.begin(), order.end())),
      solver_cfg, bound_cfg);
}

CurriculumResult random_multiseq(std::span<const TaskDataset> datasets,
                                 const SolverConfig& solver_cfg, double p_new,
                                 std::uint64_t rng_seed, const BoundConfig& bound_cfg) {
  if (!(p_new >= 0.0 && p_new <= 1.0)) throw InputError("p_new must lie in [0, 1]");
  if (datasets.empty()) throw InputError("need at least one task");
  Rng rng(rng_seed);
  Curriculum c;
  c.order = rng.permutation(datasets.size());
  c.multi_subsequence = p_new > 0.0 && datasets.size() > 1;
  for (std::size_t i = 0; i < c.order.size(); ++i) {
    if (i == 0) {
      c.transfer_sources.push_back(std::nullopt);
      continue;
    }
    const bool restart = rng.uniform() < p_new;
    c.transfer_sources.push_back(restart ? std::nullopt : std::optional(c.order[i - 1]));
  }
  return train_curriculum(datasets, c, solver_cfg, bound_cfg);
}

namespace {

struct EnumerationState {
  std::span<const TaskDataset> datasets;
  std::span<const TaskDataset> test_sets;
  const SolverConfig* solver_cfg;
  const BoundConfig* bound_cfg;
};

// Depth-first over permutations; chains sharing a prefix share its solves.
void enumerate_from(const EnumerationState& st, std::vector<std::size_t>& prefix,
                    std::vector<WeightVector>& weights, std::vector<bool>& used,
                    std::vector<OrderEntry>& out) {
  const std::size_t n = st.datasets.size();
  if (prefix.size() == n) {
    OrderEntry e;
    e.order = prefix;
    e.bound_total =
        bound_rhs(weights, Curriculum::single_sequence(prefix), st.datasets, *st.bound_cfg).total;
    if (!st.test_sets.empty()) {
      double sum = 0.0;
      for (std::size_t t = 0; t < n; ++t) sum += error_rate(weights[t], st.test_sets[t]);
      e.mean_test_error = sum / static_cast<double>(n);
    }
    out.push_back(std::move(e));
    return;
  }
  const WeightVector prototype =
      prefix.empty() ? WeightVector(st.datasets.front().dim()) : weights[prefix.back()];
  for (std::size_t k = 0; k < n; ++k) {
    if (used[k]) continue;
    weights[k] = train_adaptive_svm(st.datasets[k], prototype, *st.solver_cfg).weight;
    used[k] = true;
    prefix.push_back(k);
    enumerate_from(st, prefix, weights, used, out);
    prefix.pop_back();
    used[k] = false;
  }
}

}  // namespace

std::vector<OrderEntry> enumerate_orders(std::span<const TaskDataset> datasets,
                                         const SolverConfig& solver_cfg,
                                         const BoundConfig& bound_cfg,
                                         std::span<const TaskDataset> test_sets,
                                         std::size_t max_n) {
  check_inputs(datasets, solver_cfg, bound_cfg);
  const std::size_t n = datasets.size();
  if (n > max_n) {
    throw GuardError("refusing to enumerate " + std::to_string(n) + "! orders (cap is " +
                     std::to_string(max_n) + " tasks)");
  }
  if (!test_sets.empty() && test_sets.size() != n) {
    throw InputError("enumerate_orders: test sets must align with training sets");
  }

  const EnumerationState st{datasets, test_sets, &solver_cfg, &bound_cfg};
  // One independent subtree per first task.
  std::vector<std::vector<OrderEntry>> branches(n);
  parallel_for(n, [&](std::size_t first) {
    std::vector<std::size_t> prefix;
    std::vector<WeightVector> weights(n, WeightVector(datasets.front().dim()));
    std::vector<bool> used(n, false);
    weights[first] = train_adaptive_svm(datasets[first], weights[first], solver_cfg).weight;
    used[first] = true;
    prefix.push_back(first);
    enumerate_from(st, prefix, weights, used, branches[first]);
  });
  std::vector<OrderEntry> out;
  for (auto& b : branches) std::move(b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace seqcurl
