#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqcurl {

/// Raised for violated preconditions (dimension mismatch, empty inputs, bad config).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by loaders; the message names the file and line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a combinatorial guard refuses work (e.g. enumeration cap).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense linear predictor; the bias, when present, is the last coordinate.
struct WeightVector {
  std::vector<double> coefficients;

  WeightVector() = default;
  explicit WeightVector(std::size_t dim) : coefficients(dim, 0.0) {}
  explicit WeightVector(std::vector<double> c) : coefficients(std::move(c)) {}

  std::size_t dim() const { return coefficients.size(); }
  std::span<const double> view() const { return coefficients; }
  double operator[](std::size_t i) const { return coefficients[i]; }
  double& operator[](std::size_t i) { return coefficients[i]; }

  bool is_zero() const;
  bool is_finite() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// One task's labelled sample, stored row-major.
class TaskDataset {
 public:
  TaskDataset() = default;
  /// Throws InputError unless rows*dim == features.size(), every label is +-1,
  /// and there is at least one row and one column.
  TaskDataset(std::vector<double> features, std::vector<int> labels, std::size_t dim,
              std::string task_id = {}, std::string name = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t j) const {
    return {features_.data() + j * dim_, dim_};
  }
  int label(std::size_t j) const { return labels_[j]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }
  const std::string& task_id() const { return task_id_; }
  const std::string& name() const { return name_; }

  /// Subset of rows, in the given order.
  TaskDataset subset(std::span<const std::size_t> rows) const;

  /// Concatenates datasets of equal dimension.
  static TaskDataset merge(std::span<const TaskDataset> parts, std::string task_id = "merged");

  friend bool operator==(const TaskDataset&, const TaskDataset&) = default;

 private:
  std::vector<double> features_;
  std::vector<int> labels_;
  std::size_t dim_ = 0;
  std::string task_id_;
  std::string name_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Throws InputError when every dataset does not share `dim`.
void require_dimension(std::span<const TaskDataset> datasets, std::size_t dim);

}  // namespace seqcurl
