#include "seqcurl/bound.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "seqcurl/curriculum.hpp"

namespace seqcurl {

std::string_view to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::ErrorPlusComplexity: return "both";
    case AblationMode::ErrorOnly: return "error";
    case AblationMode::ComplexityOnly: return "compl";
  }
  return "both";
}

AblationMode parse_ablation_mode(std::string_view text) {
  if (text == "both" || text == "ErrorPlusComplexity") return AblationMode::ErrorPlusComplexity;
  if (text == "error" || text == "ErrorOnly") return AblationMode::ErrorOnly;
  if (text == "compl" || text == "ComplexityOnly") return AblationMode::ComplexityOnly;
  throw InputError("unknown ablation mode '" + std::string(text) + "'");
}

void BoundConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("bound delta must lie in (0, 1)");
}

namespace {

constexpr double kSeriesCutoff = 2.5;

// erf(z) = 2/sqrt(pi) exp(-z^2) sum_n 2^n z^(2n+1) / (1*3*...*(2n+1)).
// Every term is positive, so there is no cancellation for moderate z.
double erf_series(double z) {
  const double z2 = z * z;
  double term = z;
  double sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * z2 / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-z2) * sum;
}

// erfc(z) = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), z > 0,
// evaluated bottom-up at a fixed depth that is ample for z >= kSeriesCutoff.
double erfc_continued_fraction(double z) {
  double f = z;
  for (int k = 80; k >= 1; --k) f = z + 0.5 * k / f;
  return std::exp(-z * z) / std::sqrt(std::numbers::pi) / f;
}

void require_not_nan(double z, const char* what) {
  if (std::isnan(z)) throw InputError(std::string(what) + ": NaN input");
}

}  // namespace

double erf(double z) {
  require_not_nan(z, "erf");
  if (z < 0.0) return -erf(-z);
  if (std::isinf(z)) return 1.0;
  if (z <= kSeriesCutoff) return erf_series(z);
  return 1.0 - erfc_continued_fraction(z);
}

double erfc(double z) {
  require_not_nan(z, "erfc");
  if (z < 0.0) return 2.0 - erfc(-z);
  if (std::isinf(z)) return 0.0;
  if (z <= kSeriesCutoff) return 1.0 - erf_series(z);
  return erfc_continued_fraction(z);
}

double phi_bar(double z) {
  require_not_nan(z, "phi_bar");
  return 0.5 * erfc(z / std::numbers::sqrt2);
}

double gibbs_training_error(const WeightVector& w, const TaskDataset& data) {
  if (w.dim() != data.dim()) throw InputError("gibbs_training_error: dimension mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto x = data.row(j);
    const double norm = std::sqrt(squared_norm(x));
    if (norm == 0.0) {
      throw InputError("gibbs_training_error: zero-norm row " + std::to_string(j) + " in task '" +
                       data.task_id() + "'");
    }
    sum += phi_bar(data.label(j) * dot(w.view(), x) / norm);
  }
  return sum / static_cast<double>(data.size());
}

double complexity_term(const WeightVector& w, const WeightVector& w_prev, double m_bar) {
  if (w.dim() != w_prev.dim()) throw InputError("complexity_term: dimension mismatch");
  if (!(m_bar > 0.0)) throw InputError("complexity_term: m_bar must be positive");
  return squared_distance(w.view(), w_prev.view()) / (2.0 * std::sqrt(m_bar));
}

double harmonic_mean(std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw InputError("harmonic_mean: empty list");
  double inv = 0.0;
  for (std::size_t m : sizes) {
    if (m == 0) throw InputError("harmonic_mean: sizes must be >= 1");
    inv += 1.0 / static_cast<double>(m);
  }
  return static_cast<double>(sizes.size()) / inv;
}

double harmonic_mean(std::span<const TaskDataset> datasets) {
  std::vector<std::size_t> sizes;
  sizes.reserve(datasets.size());
  for (const auto& d : datasets) sizes.push_back(d.size());
  return harmonic_mean(sizes);
}

double task_score(const WeightVector& w, const WeightVector& w_prev, const TaskDataset& data,
                  double m_bar, const BoundConfig& config) {
  switch (config.ablation_mode) {
    case AblationMode::ErrorOnly:
      return gibbs_training_error(w, data);
    case AblationMode::ComplexityOnly:
      return complexity_term(w, w_prev, m_bar);
    case AblationMode::ErrorPlusComplexity:
      break;
  }
  return gibbs_training_error(w, data) + complexity_term(w, w_prev, m_bar);
}

double bound_constant(std::size_t n, double m_bar, double delta, bool multi_subsequence) {
  if (n == 0) throw InputError("bound_constant: n must be >= 1");
  const double root = std::sqrt(m_bar);
  const double nd = static_cast<double>(n);
  const double union_term = multi_subsequence ? std::log(2.0 * nd) : std::log(nd);
  return 1.0 / (8.0 * root) - std::log(delta) / (nd * root) + union_term / root;
}

BoundBreakdown bound_rhs(std::span<const WeightVector> weights, const Curriculum& order,
                         std::span<const TaskDataset> datasets, const BoundConfig& config) {
  config.validate();
  const std::size_t n = datasets.size();
  if (n == 0) throw InputError("bound_rhs: no tasks");
  if (weights.size() != n) throw InputError("bound_rhs: need one weight per task");
  order.validate(n);

  BoundBreakdown out;
  out.multi_subsequence = order.multi_subsequence;
  out.harmonic_mean_m = harmonic_mean(datasets);
  const WeightVector zero(weights.front().dim());
  double error_sum = 0.0;
  double complexity_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t task = order.order[i];
    const auto& source = order.transfer_sources[i];
    const WeightVector& prev = source ? weights[*source] : zero;
    const double e = gibbs_training_error(weights[task], datasets[task]);
    const double c = complexity_term(weights[task], prev, out.harmonic_mean_m);
    out.per_task_error_terms.push_back(e);
    out.per_task_complexity_terms.push_back(c);
    error_sum += e;
    complexity_sum += c;
  }
  out.constant_terms =
      bound_constant(n, out.harmonic_mean_m, config.delta, order.multi_subsequence);
  const double nd = static_cast<double>(n);
  out.total = error_sum / nd + complexity_sum / nd + out.constant_terms;
  return out;
}

}  // namespace seqcurl
