#include "seqcurl/types.hpp"

#include <cmath>

namespace seqcurl {

bool WeightVector::is_zero() const {
  for (double c : coefficients) {
    if (c != 0.0) return false;
  }
  return true;
}

bool WeightVector::is_finite() const {
  for (double c : coefficients) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

TaskDataset::TaskDataset(std::vector<double> features, std::vector<int> labels, std::size_t dim,
                         std::string task_id, std::string name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      dim_(dim),
      task_id_(std::move(task_id)),
      name_(std::move(name)) {
  if (dim_ == 0) throw InputError("dataset dimension must be >= 1");
  if (labels_.empty()) throw InputError("dataset must contain at least one sample");
  if (features_.size() != labels_.size() * dim_) {
    throw InputError("feature matrix size does not match rows x dim");
  }
  for (int y : labels_) {
    if (y != 1 && y != -1) throw InputError("labels must be -1 or +1");
  }
}

TaskDataset TaskDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> f;
  std::vector<int> y;
  f.reserve(rows.size() * dim_);
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw InputError("subset row index out of range");
    auto x = row(r);
    f.insert(f.end(), x.begin(), x.end());
    y.push_back(labels_[r]);
  }
  return TaskDataset(std::move(f), std::move(y), dim_, task_id_, name_);
}

TaskDataset TaskDataset::merge(std::span<const TaskDataset> parts, std::string task_id) {
  if (parts.empty()) throw InputError("cannot merge an empty task list");
  const std::size_t d = parts.front().dim();
  require_dimension(parts, d);
  std::vector<double> f;
  std::vector<int> y;
  for (const auto& p : parts) {
    f.insert(f.end(), p.features_.begin(), p.features_.end());
    y.insert(y.end(), p.labels_.begin(), p.labels_.end());
  }
  return TaskDataset(std::move(f), std::move(y), d, task_id, task_id);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void require_dimension(std::span<const TaskDataset> datasets, std::size_t dim) {
  for (const auto& d : datasets) {
    if (d.dim() != dim) {
      throw InputError("task '" + d.task_id() + "' has dimension " + std::to_string(d.dim()) +
                       ", expected " + std::to_string(dim));
    }
  }
}

}  // namespace seqcurl
