#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqcurl/bound.hpp"
#include "seqcurl/curriculum.hpp"
#include "seqcurl/solver.hpp"
#include "seqcurl/types.hpp"

namespace seqcurl {

enum class Method {
  IndSVM,
  MergedSVM,
  MT,
  SeqMT,
  MultiSeqMT,
  Random,
  Semantic,
  Diversity,
  RandomMultiSeq,
};

std::string_view to_string(Method method);
/// Case-insensitive; accepts the enumerator names.
Method parse_method(std::string_view text);
/// True for methods whose output includes a curriculum and bound.
bool produces_curriculum(Method method);

/// Fraction of samples with y != sign(<w, x>), where sign(0) = +1.
double error_rate(const WeightVector& w, const TaskDataset& data);

std::vector<double> default_c_grid();

struct ExperimentConfig {
  Method method = Method::SeqMT;
  int repeats = 20;
  std::vector<double> c_grid = default_c_grid();
  int cv_folds = 5;
  int cv_repeats = 5;
  std::uint64_t base_seed = 0;
  AblationMode ablation_mode = AblationMode::ErrorPlusComplexity;
  std::optional<std::vector<std::size_t>> semantic_order;  // 0-based task indices
  double p_new = 0.5;
  double delta = 0.01;
  // C is chosen by cross-validation; the remaining solver settings apply as given.
  SolverConfig solver;

  void validate(std::size_t n_tasks) const;
  BoundConfig bound_config() const { return {delta, ablation_mode}; }
};

struct MethodOutput {
  std::vector<WeightVector> weights;  // one per task
  std::optional<CurriculumResult> curriculum;
  bool converged = true;
};

/// Trains `method` on the given tasks at a fixed C. `seed` drives the random
/// order of Random and RandomMultiSeq.
MethodOutput run_method(Method method, std::span<const TaskDataset> train, double C,
                        const ExperimentConfig& config, std::uint64_t seed);

struct CvResult {
  double selected_C = 0.0;
  std::vector<double> validation_error;  // aligned with the grid; empty for a one-point grid
  bool stratified = true;
};

/// Repeated k-fold selection of C. Each fold re-runs the whole method (order
/// selection included) on the training part of every task and scores the
/// held-out part. Ties go to the smaller C.
CvResult cross_validate_C(std::span<const TaskDataset> train, const ExperimentConfig& config,
                          std::uint64_t seed);

struct ExperimentReport {
  Method method = Method::SeqMT;
  std::vector<std::string> task_ids;
  std::vector<std::vector<double>> per_repeat_task_errors;
  double mean_error = 0.0;
  double sem = 0.0;
  std::vector<double> selected_C;
  std::vector<std::optional<Curriculum>> curricula;
  std::vector<std::optional<BoundBreakdown>> bound_values;
  bool stratified_folds = true;
  bool converged = true;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Mean over repeats of the per-repeat task average, and its standard error
/// (sample standard deviation over sqrt(repeats); zero for a single repeat).
std::pair<double, double> mean_and_sem(const std::vector<std::vector<double>>& per_repeat);

using RepeatData = std::pair<std::vector<TaskDataset>, std::vector<TaskDataset>>;

/// Same train/test data for every repeat; repeats differ by seed only.
ExperimentReport run_experiment(std::span<const TaskDataset> train,
                                std::span<const TaskDataset> test,
                                const ExperimentConfig& config);

/// Fresh data per repeat, e.g. regenerated synthetic tasks or new splits.
ExperimentReport run_experiment(const std::function<RepeatData(int repeat)>& data,
                                const ExperimentConfig& config);

}  // namespace seqcurl
