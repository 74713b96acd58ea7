#include "seqcurl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqcurl/random.hpp"

namespace seqcurl {

void SolverConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw InputError("solver C must be positive and finite");
  if (!(tolerance > 0.0)) throw InputError("solver tolerance must be positive");
  if (max_iterations < 1) throw InputError("solver max_iterations must be >= 1");
}

// Substituting v = w - w~ turns
//     min ||w - w~||^2 + (C/m) sum xi_j   s.t. y_j <w, x_j> >= 1 - xi_j, xi_j >= 0
// into a standard soft-margin problem in v with per-sample targets
//     rho_j = 1 - y_j <w~, x_j>,   y_j <v, x_j> >= rho_j - xi_j.
// Halving the objective gives the textbook form 1/2 ||v||^2 + U sum xi_j with
// U = C / (2m), whose dual is
//     max_{0 <= a_j <= U}  sum_j a_j rho_j - 1/2 ||sum_j a_j y_j x_j||^2,
// with v = sum_j a_j y_j x_j. Coordinate ascent on a_j has the closed-form step
//     a_j <- clip(a_j - (y_j <v, x_j> - rho_j) / ||x_j||^2, 0, U).
// Objectives are reported in the unhalved scale: P = ||v||^2 + (C/m) sum hinge,
// D = 2 sum a_j rho_j - ||v||^2, so the gap P - D is directly comparable to
// `tolerance`.
SolveResult train_adaptive_svm(const TaskDataset& data, const WeightVector& prototype,
                               const SolverConfig& config) {
  config.validate();
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  if (prototype.dim() != d) {
    throw InputError("prototype dimension " + std::to_string(prototype.dim()) +
                     " does not match data dimension " + std::to_string(d));
  }

  const double upper = config.C / (2.0 * static_cast<double>(m));
  std::vector<double> rho(m), qdiag(m), alpha(m, 0.0), v(d, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    rho[j] = 1.0 - data.label(j) * dot(prototype.view(), data.row(j));
    qdiag[j] = squared_norm(data.row(j));
  }

  Rng rng(config.shuffle_seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});

  SolveResult result;
  double primal = 0.0;
  double dual = 0.0;
  int epoch = 0;
  for (; epoch < config.max_iterations;) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t j : order) {
      const auto x = data.row(j);
      const double y = data.label(j);
      double next;
      if (qdiag[j] <= 0.0) {
        next = rho[j] > 0.0 ? upper : 0.0;
      } else {
        const double grad = y * dot(v, x) - rho[j];
        next = std::clamp(alpha[j] - grad / qdiag[j], 0.0, upper);
      }
      const double delta = next - alpha[j];
      if (delta != 0.0) {
        alpha[j] = next;
        for (std::size_t k = 0; k < d; ++k) v[k] += delta * y * x[k];
      }
    }
    ++epoch;

    const double vv = squared_norm(v);
    double hinge = 0.0;
    double linear = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      hinge += std::max(0.0, rho[j] - data.label(j) * dot(v, data.row(j)));
      linear += alpha[j] * rho[j];
    }
    primal = vv + config.C / static_cast<double>(m) * hinge;
    dual = 2.0 * linear - vv;
    if (primal - dual <= config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.weight = WeightVector(d);
  for (std::size_t k = 0; k < d; ++k) result.weight[k] = prototype[k] + v[k];
  result.primal_objective = primal;
  result.dual_objective = dual;
  result.iterations = epoch;
  return result;
}

SolveResult train_linear_svm(const TaskDataset& data, const SolverConfig& config) {
  return train_adaptive_svm(data, WeightVector(data.dim()), config);
}

double primal_objective(const TaskDataset& data, const WeightVector& prototype, double C,
                        const WeightVector& w) {
  if (prototype.dim() != data.dim() || w.dim() != data.dim()) {
    throw InputError("primal_objective: dimension mismatch");
  }
  double hinge = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    hinge += std::max(0.0, 1.0 - data.label(j) * dot(w.view(), data.row(j)));
  }
  return squared_distance(w.view(), prototype.view()) +
         C / static_cast<double>(data.size()) * hinge;
}

double mt_objective(std::span<const TaskDataset> datasets, const WeightVector& prototype,
                    std::span<const WeightVector> weights, double C) {
  if (datasets.empty() || datasets.size() != weights.size()) {
    throw InputError("mt_objective: need one weight per task");
  }
  // Each task's block is exactly an adaptive objective anchored at w0.
  double blocks = 0.0;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    blocks += primal_objective(datasets[i], prototype, C, weights[i]);
  }
  return squared_norm(prototype.view()) + blocks / static_cast<double>(datasets.size());
}

WeightVector mt_prototype_update(std::span<const WeightVector> weights) {
  if (weights.empty()) throw InputError("mt_prototype_update: no weights");
  const std::size_t d = weights.front().dim();
  WeightVector w0(d);
  for (const auto& w : weights) {
    if (w.dim() != d) throw InputError("mt_prototype_update: dimension mismatch");
    for (std::size_t k = 0; k < d; ++k) w0[k] += w[k];
  }
  const double scale = 0.5 / static_cast<double>(weights.size());
  for (auto& c : w0.coefficients) c *= scale;
  return w0;
}

MtResult train_mt_joint(std::span<const TaskDataset> datasets, const SolverConfig& config,
                        int max_rounds) {
  config.validate();
  if (datasets.empty()) throw InputError("train_mt_joint: empty task list");
  const std::size_t d = datasets.front().dim();
  require_dimension(datasets, d);
  const std::size_t n = datasets.size();

  MtResult out;
  out.prototype = WeightVector(d);
  out.weights.assign(n, WeightVector(d));
  double current = mt_objective(datasets, out.prototype, out.weights, config.C);
  out.objective_history.push_back(current);

  for (int round = 0; round < max_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      SolveResult r = train_adaptive_svm(datasets[i], out.prototype, config);
      out.solves_converged = out.solves_converged && r.converged;
      const double fresh = primal_objective(datasets[i], out.prototype, config.C, r.weight);
      const double kept = primal_objective(datasets[i], out.prototype, config.C, out.weights[i]);
      if (fresh < kept) out.weights[i] = std::move(r.weight);
    }
    WeightVector w0 = mt_prototype_update(out.weights);
    if (mt_objective(datasets, w0, out.weights, config.C) <
        mt_objective(datasets, out.prototype, out.weights, config.C)) {
      out.prototype = std::move(w0);
    }
    const double next = mt_objective(datasets, out.prototype, out.weights, config.C);
    out.objective_history.push_back(next);
    out.rounds = round + 1;
    const double decrease = current - next;
    current = next;
    if (decrease < config.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace seqcurl
