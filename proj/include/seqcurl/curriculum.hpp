#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqcurl/bound.hpp"
#include "seqcurl/solver.hpp"
#include "seqcurl/types.hpp"

namespace seqcurl {

/// Order in which tasks are solved plus where each one takes its prototype from.
/// Task indices are 0-based positions in the dataset list.
struct Curriculum {
  std::vector<std::size_t> order;
  // Entry i: task whose weight served as prototype for order[i]; nullopt means
  // the zero prototype (start of a subsequence).
  std::vector<std::optional<std::size_t>> transfer_sources;
  // Set by methods that may open several subsequences; selects the log(2n)
  // variant of the bound constant.
  bool multi_subsequence = false;

  static Curriculum single_sequence(std::vector<std::size_t> order);

  std::size_t size() const { return order.size(); }
  std::size_t subsequence_count() const;

  /// Throws InputError unless `order` is a permutation of [0, n) and the
  /// transfer edges form vertex-disjoint simple paths that run forward in time.
  void validate(std::size_t n) const;

  friend bool operator==(const Curriculum&, const Curriculum&) = default;
};

struct CurriculumResult {
  Curriculum curriculum;
  std::vector<WeightVector> weights;  // indexed by task
  std::vector<double> scores;         // indexed by step
  BoundBreakdown bound;
  bool converged = true;  // every solve performed, candidates included, converged
  std::size_t solves = 0;
};

/// Greedy single-sequence order: at each step the unused task with the lowest
/// score, given the previous task's weight as prototype. Ties go to the lowest
/// task index.
CurriculumResult seqmt(std::span<const TaskDataset> datasets, const SolverConfig& solver_cfg,
                       const BoundConfig& bound_cfg);

/// Same search maximizing the score instead.
CurriculumResult diversity_order(std::span<const TaskDataset> datasets,
                                 const SolverConfig& solver_cfg, const BoundConfig& bound_cfg);

/// Greedy search that may continue any open subsequence or open a new one from
/// the zero prototype.
CurriculumResult multi_seqmt(std::span<const TaskDataset> datasets,
                             const SolverConfig& solver_cfg, const BoundConfig& bound_cfg);

/// Trains a given curriculum without any selection.
CurriculumResult train_curriculum(std::span<const TaskDataset> datasets,
                                  const Curriculum& curriculum, const SolverConfig& solver_cfg,
                                  const BoundConfig& bound_cfg = {});

/// Single chain in the given order.
CurriculumResult fixed_order(std::span<const TaskDataset> datasets,
                             std::span<const std::size_t> order, const SolverConfig& solver_cfg,
                             const BoundConfig& bound_cfg = {});

/// Random order; before every task after the first, the chain restarts from the
/// zero prototype with probability p_new.
CurriculumResult random_multiseq(std::span<const TaskDataset> datasets,
                                 const SolverConfig& solver_cfg, double p_new,
                                 std::uint64_t rng_seed, const BoundConfig& bound_cfg = {});

struct OrderEntry {
  std::vector<std::size_t> order;
  double bound_total = 0.0;
  std::optional<double> mean_test_error;
};

inline constexpr std::size_t kDefaultEnumerationCap = 8;

/// Every permutation as a single chain, in lexicographic order. Throws
/// GuardError when there are more than `max_n` tasks.
std::vector<OrderEntry> enumerate_orders(std::span<const TaskDataset> datasets,
                                         const SolverConfig& solver_cfg,
                                         const BoundConfig& bound_cfg,
                                         std::span<const TaskDataset> test_sets = {},
                                         std::size_t max_n = kDefaultEnumerationCap);

}  // namespace seqcurl
