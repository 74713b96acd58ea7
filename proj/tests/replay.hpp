#pragma once

// Post-hoc replay of greedy selections: re-solves every candidate at every step
// with the public solver and scoring functions and reports whether the
// recorded choice is the one the selection rule demands.

#include <optional>
#include <string>
#include <vector>

#include "seqcurl/bound.hpp"
#include "seqcurl/curriculum.hpp"
#include "seqcurl/solver.hpp"

namespace replay {

enum class Rule { Min, Max };

/// Single-chain methods (SeqMT: Min, Diversity: Max). Returns an empty string
/// on success, otherwise a description of the first mismatch.
inline std::string check_chain(const seqcurl::CurriculumResult& r,
                               const std::vector<seqcurl::TaskDataset>& data,
                               const seqcurl::SolverConfig& solver,
                               const seqcurl::BoundConfig& bound, Rule rule) {
  using namespace seqcurl;
  const std::size_t n = data.size();
  const double m_bar = harmonic_mean(data);
  std::vector<bool> used(n, false);
  WeightVector prev(data[0].dim());
  for (std::size_t step = 0; step < n; ++step) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    WeightVector best_w;
    for (std::size_t k = 0; k < n; ++k) {
      if (used[k]) continue;
      const WeightVector w = train_adaptive_svm(data[k], prev, solver).weight;
      const double s = task_score(w, prev, data[k], m_bar, bound);
      const bool wins = rule == Rule::Min ? s < best_score : s > best_score;
      if (!best || wins) {
        best = k;
        best_score = s;
        best_w = w;
      }
    }
    if (r.curriculum.order[step] != *best) return "step " + std::to_string(step) + ": task mismatch";
    if (r.scores[step] != best_score) return "step " + std::to_string(step) + ": score mismatch";
    if (!(r.weights[*best] == best_w)) return "step " + std::to_string(step) + ": weight mismatch";
    used[*best] = true;
    prev = best_w;
  }
  return {};
}

/// MultiSeqMT: the pool before each step is the zero prototype plus every solved
/// task that has not yet seeded a successor. The recorded (prototype, task) pair
/// must minimize the score over all pool/task pairs (ties: lower task, then
/// earlier pool entry).
inline std::string check_multi(const seqcurl::CurriculumResult& r,
                               const std::vector<seqcurl::TaskDataset>& data,
                               const seqcurl::SolverConfig& solver,
                               const seqcurl::BoundConfig& bound) {
  using namespace seqcurl;
  const std::size_t n = data.size();
  const double m_bar = harmonic_mean(data);
  const WeightVector zero(data[0].dim());
  std::vector<std::optional<std::size_t>> pool{std::nullopt};
  std::vector<bool> used(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::optional<std::size_t> best_pool;
    std::size_t best_task = 0;
    double best_score = 0.0;
    WeightVector best_w;
    for (std::size_t p = 0; p < pool.size(); ++p) {
      const WeightVector& proto = pool[p] ? r.weights[*pool[p]] : zero;
      for (std::size_t k = 0; k < n; ++k) {
        if (used[k]) continue;
        const WeightVector w = train_adaptive_svm(data[k], proto, solver).weight;
        const double s = task_score(w, proto, data[k], m_bar, bound);
        if (!best_pool || s < best_score || (s == best_score && k < best_task)) {
          best_pool = p;
          best_task = k;
          best_score = s;
          best_w = w;
        }
      }
    }
    if (r.curriculum.order[step] != best_task) return "step " + std::to_string(step) + ": task mismatch";
    if (r.curriculum.transfer_sources[step] != pool[*best_pool]) {
      return "step " + std::to_string(step) + ": prototype mismatch";
    }
    if (r.scores[step] != best_score) return "step " + std::to_string(step) + ": score mismatch";
    if (!(r.weights[best_task] == best_w)) return "step " + std::to_string(step) + ": weight mismatch";
    used[best_task] = true;
    if (pool[*best_pool]) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*best_pool));
    pool.push_back(best_task);
  }
  return {};
}

}  // namespace replay
