#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqcurl/types.hpp"

namespace seqcurl {

struct Curriculum;

/// Which parts of the per-step score drive task selection.
enum class AblationMode { ErrorPlusComplexity, ErrorOnly, ComplexityOnly };

std::string_view to_string(AblationMode mode);
AblationMode parse_ablation_mode(std::string_view text);

struct BoundConfig {
  double delta = 0.01;
  AblationMode ablation_mode = AblationMode::ErrorPlusComplexity;

  void validate() const;
};

/// Right-hand side of the sequential generalization bound, split into its
/// parts. It bounds half of the average expected error, not the error itself.
/// Per-task vectors are indexed by position in the curriculum.
struct BoundBreakdown {
  std::vector<double> per_task_error_terms;
  std::vector<double> per_task_complexity_terms;
  double constant_terms = 0.0;
  double total = 0.0;
  double harmonic_mean_m = 0.0;
  bool multi_subsequence = false;

  friend bool operator==(const BoundBreakdown&, const BoundBreakdown&) = default;
};

/// Gauss error function, computed without libm's erf.
double erf(double z);
/// Complementary error function 1 - erf(z), accurate in the tails.
double erfc(double z);

/// Gaussian tail 1/2 (1 - erf(z / sqrt 2)).
double phi_bar(double z);

/// (1/m) sum_j phi_bar(y_j <w, x_j> / ||x_j||): expected 0/1 loss of the Gibbs
/// classifier with a unit-variance Gaussian posterior centred at w.
double gibbs_training_error(const WeightVector& w, const TaskDataset& data);

/// ||w - w_prev||^2 / (2 sqrt(m_bar)); the KL divergence between unit-variance
/// Gaussians at w and w_prev, scaled by 1/sqrt(m_bar).
double complexity_term(const WeightVector& w, const WeightVector& w_prev, double m_bar);

double harmonic_mean(std::span<const std::size_t> sizes);
double harmonic_mean(std::span<const TaskDataset> datasets);

/// Greedy selection score for one candidate task.
double task_score(const WeightVector& w, const WeightVector& w_prev, const TaskDataset& data,
                  double m_bar, const BoundConfig& config);

/// 1/(8 sqrt m) - log(delta)/(n sqrt m) + log(n)/sqrt m, with log(2n) in place
/// of log(n) when the bound must hold over every subsequence split.
double bound_constant(std::size_t n, double m_bar, double delta, bool multi_subsequence);

/// Evaluates the bound for a trained curriculum. `weights[i]` belongs to task i.
/// The ablation mode does not apply here; the full bound is always reported.
BoundBreakdown bound_rhs(std::span<const WeightVector> weights, const Curriculum& order,
                         std::span<const TaskDataset> datasets, const BoundConfig& config);

}  // namespace seqcurl
