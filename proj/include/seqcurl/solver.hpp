#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqcurl/types.hpp"

namespace seqcurl {

struct SolverConfig {
  double C = 1.0;
  double tolerance = 1e-6;    // absolute duality gap, in the objective's own scale
  int max_iterations = 10000; // epochs over the sample
  std::uint64_t shuffle_seed = 0;

  void validate() const;
};

struct SolveResult {
  WeightVector weight;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  bool converged = false;

  double gap() const { return primal_objective - dual_objective; }
};

/// min_w ||w - prototype||^2 + (C/m) sum_j max(0, 1 - y_j <w, x_j>)
SolveResult train_adaptive_svm(const TaskDataset& data, const WeightVector& prototype,
                               const SolverConfig& config);

/// Adaptive SVM with the zero prototype.
SolveResult train_linear_svm(const TaskDataset& data, const SolverConfig& config);

/// Objective of the adaptive problem evaluated at `w`.
double primal_objective(const TaskDataset& data, const WeightVector& prototype, double C,
                        const WeightVector& w);

struct MtResult {
  WeightVector prototype;
  std::vector<WeightVector> weights;
  std::vector<double> objective_history;  // entry 0 is the starting point (all zero)
  int rounds = 0;
  bool converged = false;        // outer loop met the tolerance
  bool solves_converged = true;  // every inner solve met its gap tolerance
};

/// Joint multi-task objective:
///   ||w0||^2 + (1/n) sum_i ||w_i - w0||^2 + (C/n) sum_i (1/m_i) sum_j hinge_ij
double mt_objective(std::span<const TaskDataset> datasets, const WeightVector& prototype,
                    std::span<const WeightVector> weights, double C);

/// Minimizer of ||w0||^2 + (1/n) sum_i ||w_i - w0||^2, which is mean(w_i) / 2.
WeightVector mt_prototype_update(std::span<const WeightVector> weights);

/// Block-alternating minimization of mt_objective. The objective history is
/// non-increasing: a task keeps its previous weight whenever the fresh solve
/// does not improve its block.
MtResult train_mt_joint(std::span<const TaskDataset> datasets, const SolverConfig& config,
                        int max_rounds = 500);

}  // namespace seqcurl
