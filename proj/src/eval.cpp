#include "seqcurl/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "seqcurl/parallel.hpp"
#include "seqcurl/random.hpp"

namespace seqcurl {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::IndSVM, "IndSVM"},
    {Method::MergedSVM, "MergedSVM"},
    {Method::MT, "MT"},
    {Method::SeqMT, "SeqMT"},
    {Method::MultiSeqMT, "MultiSeqMT"},
    {Method::Random, "Random"},
    {Method::Semantic, "Semantic"},
    {Method::Diversity, "Diversity"},
    {Method::RandomMultiSeq, "RandomMultiSeq"},
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (const auto& [m, name] : kMethodNames) {
    if (iequals(text, name)) return m;
  }
  throw InputError("unknown method '" + std::string(text) + "'");
}

bool produces_curriculum(Method method) {
  switch (method) {
    case Method::IndSVM:
    case Method::MergedSVM:
    case Method::MT:
      return false;
    default:
      return true;
  }
}

double error_rate(const WeightVector& w, const TaskDataset& data) {
  if (w.dim() != data.dim()) throw InputError("error_rate: dimension mismatch");
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const int predicted = dot(w.view(), data.row(j)) >= 0.0 ? 1 : -1;
    if (predicted != data.label(j)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

std::vector<double> default_c_grid() {
  return {1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4, 1e5};
}

void ExperimentConfig::validate(std::size_t n_tasks) const {
  if (repeats < 1) throw InputError("repeats must be >= 1");
  if (cv_folds < 2) throw InputError("cv_folds must be >= 2");
  if (cv_repeats < 1) throw InputError("cv_repeats must be >= 1");
  if (c_grid.empty()) throw InputError("C grid is empty");
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > 0.0)) throw InputError("C grid values must be positive");
    if (i > 0 && !(c_grid[i] > c_grid[i - 1])) {
      throw InputError("C grid must be strictly increasing");
    }
  }
  if (!(p_new >= 0.0 && p_new <= 1.0)) throw InputError("p_new must lie in [0, 1]");
  bound_config().validate();
  if (method == Method::Semantic) {
    if (!semantic_order) throw InputError("the Semantic method requires semantic_order");
    Curriculum::single_sequence(*semantic_order).validate(n_tasks);
  } else if (semantic_order) {
    throw InputError("semantic_order is only valid with the Semantic method");
  }
}

MethodOutput run_method(Method method, std::span<const TaskDataset> train, double C,
                        const ExperimentConfig& config, std::uint64_t seed) {
  if (train.empty()) throw InputError("run_method: no tasks");
  SolverConfig solver = config.solver;
  solver.C = C;
  const BoundConfig bound = config.bound_config();
  const std::uint64_t order_seed = derive_seed(seed, 0x0dde5);

  MethodOutput out;
  auto from_curriculum = [&out](CurriculumResult r) {
    out.weights = r.weights;
    out.converged = r.converged;
    out.curriculum = std::move(r);
  };
  switch (method) {
    case Method::IndSVM:
      for (const auto& task : train) {
        SolveResult r = train_linear_svm(task, solver);
        out.converged = out.converged && r.converged;
        out.weights.push_back(std::move(r.weight));
      }
      break;
    case Method::MergedSVM: {
      SolveResult r = train_linear_svm(TaskDataset::merge(train), solver);
      out.converged = r.converged;
      out.weights.assign(train.size(), r.weight);
      break;
    }
    case Method::MT: {
      MtResult r = train_mt_joint(train, solver);
      out.converged = r.converged && r.solves_converged;
      out.weights = std::move(r.weights);
      break;
    }
    case Method::SeqMT:
      from_curriculum(seqmt(train, solver, bound));
      break;
    case Method::MultiSeqMT:
      from_curriculum(multi_seqmt(train, solver, bound));
      break;
    case Method::Diversity:
      from_curriculum(diversity_order(train, solver, bound));
      break;
    case Method::Semantic:
      if (!config.semantic_order) throw InputError("the Semantic method requires semantic_order");
      from_curriculum(fixed_order(train, *config.semantic_order, solver, bound));
      break;
    case Method::Random:
      from_curriculum(random_multiseq(train, solver, 0.0, order_seed, bound));
      break;
    case Method::RandomMultiSeq:
      from_curriculum(random_multiseq(train, solver, config.p_new, order_seed, bound));
      break;
  }
  return out;
}

namespace {

// fold_of[task][sample] for one CV repeat.
using FoldAssignment = std::vector<std::vector<int>>;

bool can_stratify(std::span<const TaskDataset> train, int folds) {
  for (const auto& task : train) {
    const auto pos = std::count(task.labels().begin(), task.labels().end(), 1);
    const auto neg = static_cast<std::ptrdiff_t>(task.size()) - pos;
    if ((pos > 0 && pos < folds) || (neg > 0 && neg < folds)) return false;
  }
  return true;
}

FoldAssignment assign_folds(std::span<const TaskDataset> train, int folds, bool stratified,
                            std::uint64_t seed) {
  FoldAssignment out;
  for (std::size_t t = 0; t < train.size(); ++t) {
    const TaskDataset& task = train[t];
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> idx(task.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(idx));
    if (stratified) {
      // Positives first, then negatives; dealing round-robin balances both.
      std::stable_partition(idx.begin(), idx.end(),
                            [&](std::size_t j) { return task.label(j) == 1; });
    }
    std::vector<int> fold(task.size());
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>(k % folds);
    out.push_back(std::move(fold));
  }
  return out;
}

}  // namespace

CvResult cross_validate_C(std::span<const TaskDataset> train, const ExperimentConfig& config,
                          std::uint64_t seed) {
  config.validate(train.size());
  CvResult out;
  if (config.c_grid.size() == 1) {
    out.selected_C = config.c_grid.front();
    return out;
  }
  for (const auto& task : train) {
    if (task.size() < 2) {
      throw InputError("cross-validation needs at least 2 samples in task '" + task.task_id() +
                       "'");
    }
  }

  const int folds = config.cv_folds;
  out.stratified = can_stratify(train, folds);
  std::vector<FoldAssignment> assignments;
  for (int r = 0; r < config.cv_repeats; ++r) {
    assignments.push_back(assign_folds(train, folds, out.stratified, derive_seed(seed, 1000 + r)));
  }

  const std::size_t grid = config.c_grid.size();
  const std::size_t per_c = static_cast<std::size_t>(config.cv_repeats * folds);
  std::vector<double> fold_error(grid * per_c, 0.0);
  parallel_for(grid * per_c, [&](std::size_t job) {
    const std::size_t c = job / per_c;
    const int r = static_cast<int>(job % per_c) / folds;
    const int f = static_cast<int>(job % per_c) % folds;
    std::vector<TaskDataset> fit;
    std::vector<TaskDataset> held_out;
    std::vector<bool> has_validation;
    for (std::size_t t = 0; t < train.size(); ++t) {
      std::vector<std::size_t> in, out_rows;
      for (std::size_t j = 0; j < train[t].size(); ++j) {
        (assignments[r][t][j] == f ? out_rows : in).push_back(j);
      }
      if (in.empty()) {
        throw InputError("cross-validation fold leaves task '" + train[t].task_id() +
                         "' without training data");
      }
      fit.push_back(train[t].subset(in));
      has_validation.push_back(!out_rows.empty());
      held_out.push_back(out_rows.empty() ? fit.back() : train[t].subset(out_rows));
    }
    const MethodOutput m =
        run_method(config.method, fit, config.c_grid[c], config, derive_seed(seed, 2000 + r));
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t t = 0; t < train.size(); ++t) {
      if (!has_validation[t]) continue;
      sum += error_rate(m.weights[t], held_out[t]);
      ++counted;
    }
    fold_error[job] = counted ? sum / static_cast<double>(counted) : 0.0;
  });

  std::size_t best = 0;
  for (std::size_t c = 0; c < grid; ++c) {
    double sum = 0.0;
    for (std::size_t k = 0; k < per_c; ++k) sum += fold_error[c * per_c + k];
    out.validation_error.push_back(sum / static_cast<double>(per_c));
    if (out.validation_error[c] < out.validation_error[best]) best = c;
  }
  out.selected_C = config.c_grid[best];
  return out;
}

std::pair<double, double> mean_and_sem(const std::vector<std::vector<double>>& per_repeat) {
  if (per_repeat.empty()) return {0.0, 0.0};
  std::vector<double> averages;
  for (const auto& row : per_repeat) {
    averages.push_back(row.empty() ? 0.0
                                   : std::accumulate(row.begin(), row.end(), 0.0) /
                                         static_cast<double>(row.size()));
  }
  const double r = static_cast<double>(averages.size());
  const double mean = std::accumulate(averages.begin(), averages.end(), 0.0) / r;
  if (averages.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double a : averages) ss += (a - mean) * (a - mean);
  return {mean, std::sqrt(ss / (r - 1.0)) / std::sqrt(r)};
}

ExperimentReport run_experiment(std::span<const TaskDataset> train,
                                std::span<const TaskDataset> test,
                                const ExperimentConfig& config) {
  if (train.size() != test.size()) throw InputError("train and test task lists must align");
  RepeatData fixed{std::vector<TaskDataset>(train.begin(), train.end()),
                   std::vector<TaskDataset>(test.begin(), test.end())};
  return run_experiment([&fixed](int) { return fixed; }, config);
}

ExperimentReport run_experiment(const std::function<RepeatData(int repeat)>& data,
                                const ExperimentConfig& config) {
  if (config.repeats < 1) throw InputError("repeats must be >= 1");
  const std::size_t repeats = static_cast<std::size_t>(config.repeats);

  ExperimentReport report;
  report.method = config.method;
  report.per_repeat_task_errors.resize(repeats);
  report.selected_C.resize(repeats);
  report.curricula.resize(repeats);
  report.bound_values.resize(repeats);
  std::vector<char> stratified(repeats, 1), converged(repeats, 1);
  std::vector<std::string> task_ids;

  parallel_for(repeats, [&](std::size_t r) {
    const RepeatData split = data(static_cast<int>(r));
    const auto& [train, test] = split;
    if (train.empty() || train.size() != test.size()) {
      throw InputError("train and test task lists must align");
    }
    require_dimension(train, train.front().dim());
    require_dimension(test, train.front().dim());
    config.validate(train.size());

    const std::uint64_t seed = config.base_seed + r;
    const CvResult cv = cross_validate_C(train, config, seed);
    const MethodOutput m = run_method(config.method, train, cv.selected_C, config, seed);
    std::vector<double> errors;
    for (std::size_t t = 0; t < train.size(); ++t) errors.push_back(error_rate(m.weights[t], test[t]));

    report.per_repeat_task_errors[r] = std::move(errors);
    report.selected_C[r] = cv.selected_C;
    if (m.curriculum) {
      report.curricula[r] = m.curriculum->curriculum;
      report.bound_values[r] = m.curriculum->bound;
    }
    stratified[r] = cv.stratified;
    converged[r] = m.converged;
    if (r == 0) {
      for (const auto& t : train) task_ids.push_back(t.task_id());
    }
  });

  report.task_ids = std::move(task_ids);
  report.stratified_folds = std::all_of(stratified.begin(), stratified.end(), [](char c) { return c; });
  report.converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c; });
  std::tie(report.mean_error, report.sem) = mean_and_sem(report.per_repeat_task_errors);
  return report;
}

}  // namespace seqcurl
