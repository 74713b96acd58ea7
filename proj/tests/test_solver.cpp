#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "seqcurl/eval.hpp"
#include "seqcurl/solver.hpp"

using namespace seqcurl;

namespace {

std::vector<std::vector<double>> rows_of(const TaskDataset& d) {
  std::vector<std::vector<double>> out;
  for (std::size_t j = 0; j < d.size(); ++j) out.emplace_back(d.row(j).begin(), d.row(j).end());
  return out;
}

double norm_diff(const WeightVector& a, const WeightVector& b) {
  return std::sqrt(squared_distance(a.view(), b.view()));
}

}  // namespace

TEST_CASE("toy task optimum matches the brute-force oracle") {
  const TaskDataset toy = fixtures::toy_task();
  const WeightVector proto(std::vector<double>{0.5, 0.0, 0.0});
  SolverConfig cfg;
  cfg.C = 1.0;
  const SolveResult r = train_adaptive_svm(toy, proto, cfg);
  REQUIRE(r.converged);

  const auto oracle_sol = oracle::brute_force_adaptive_svm(rows_of(toy), toy.labels(), {0.5, 0, 0}, 1.0);
  // Frozen from an independent convex solve: optimum 1/2 at w = (5/6, 1/6, 1/6).
  CHECK(oracle_sol.objective == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.primal_objective == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(primal_objective(toy, proto, 1.0, r.weight) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.weight[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-3));
  CHECK(r.weight[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-3));
  CHECK(r.weight[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-3));
}

TEST_CASE("zero prototype reduces to the standard SVM") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const TaskDataset d = fixtures::random_task(rng, 12, 4);
    SolverConfig cfg;
    cfg.C = 10.0;
    cfg.shuffle_seed = 17;
    const SolveResult a = train_adaptive_svm(d, WeightVector(4), cfg);
    const SolveResult b = train_linear_svm(d, cfg);
    CHECK(norm_diff(a.weight, b.weight) <= 1e-6);
  }
}

TEST_CASE("vanishing C pins the solution to the prototype") {
  Rng rng(5);
  const TaskDataset d = fixtures::random_task(rng, 10, 3);
  const WeightVector proto(std::vector<double>{0.3, -1.2, 0.7});
  SolverConfig cfg;
  cfg.C = 1e-8;
  const SolveResult r = train_adaptive_svm(d, proto, cfg);
  CHECK(norm_diff(r.weight, proto) <= 1e-3);
}

TEST_CASE("linear SVM edge cases") {
  SolverConfig cfg;
  SUBCASE("separable pair reaches zero training error") {
    cfg.C = 1e3;
    const TaskDataset d = fixtures::make_task({{1, 1}, {-1, -1}}, {1, -1});
    const SolveResult r = train_linear_svm(d, cfg);
    CHECK(error_rate(r.weight, d) == 0.0);
  }
  SUBCASE("single positive point") {
    const TaskDataset d = fixtures::make_task({{1, 1}}, {1});
    const SolveResult r = train_linear_svm(d, cfg);
    CHECK(dot(r.weight.view(), d.row(0)) > 0.0);
  }
  SUBCASE("XOR has no linear separator") {
    cfg.C = 1e3;
    const TaskDataset d =
        fixtures::make_task({{1, 1, 1}, {-1, -1, 1}, {1, -1, 1}, {-1, 1, 1}}, {1, 1, -1, -1});
    const SolveResult r = train_linear_svm(d, cfg);
    CHECK(error_rate(r.weight, d) > 0.0);
  }
}

TEST_CASE("input validation") {
  const TaskDataset toy = fixtures::toy_task();
  SolverConfig cfg;
  CHECK_THROWS_AS(train_adaptive_svm(toy, WeightVector(2), cfg), InputError);
  CHECK_THROWS_AS(primal_objective(toy, WeightVector(2), 1.0, WeightVector(3)), InputError);
  cfg.C = 0.0;
  CHECK_THROWS_AS(train_linear_svm(toy, cfg), InputError);
  cfg.C = 1.0;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(train_linear_svm(toy, cfg), InputError);
  CHECK_THROWS_AS(train_mt_joint(std::vector<TaskDataset>{}, SolverConfig{}), InputError);
}

TEST_CASE("iteration cap reports non-convergence instead of failing") {
  Rng rng(11);
  const TaskDataset d = fixtures::random_task(rng, 40, 5);
  SolverConfig cfg;
  cfg.C = 1e5;
  cfg.max_iterations = 1;
  const SolveResult r = train_linear_svm(d, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.weight.is_finite());
}

TEST_CASE("primal objective hand cases") {
  SUBCASE("every point on the hyperplane costs exactly C") {
    const TaskDataset d = fixtures::make_task({{1, 0}, {0, 1}, {-1, 0}}, {1, -1, 1});
    const WeightVector w(2);
    CHECK(primal_objective(d, w, 2.5, w) == doctest::Approx(2.5));
  }
  SUBCASE("all margins at least one costs nothing") {
    const TaskDataset d = fixtures::make_task({{2, 0}, {-1, 0}}, {1, -1});
    const WeightVector w(std::vector<double>{1.0, 0.0});
    CHECK(primal_objective(d, w, 7.0, w) == 0.0);
  }
}

TEST_CASE("converged solves are optimal, tight and deterministic") {
  Rng rng(21);
  Rng dir_rng(22);
  for (int trial = 0; trial < 8; ++trial) {
    const TaskDataset d = fixtures::random_task(rng, 15, 4);
    WeightVector proto(4);
    for (std::size_t k = 0; k < 4; ++k) proto[k] = rng.normal();
    SolverConfig cfg;
    cfg.C = std::pow(10.0, trial % 4);
    cfg.shuffle_seed = static_cast<std::uint64_t>(trial);
    const SolveResult r = train_adaptive_svm(d, proto, cfg);
    REQUIRE(r.converged);
    CHECK(r.gap() <= cfg.tolerance);
    CHECK(r.primal_objective >= r.dual_objective - cfg.tolerance);

    const double best = primal_objective(d, proto, cfg.C, r.weight);
    for (int p = 0; p < 100; ++p) {
      WeightVector u(4);
      for (std::size_t k = 0; k < 4; ++k) u[k] = dir_rng.normal();
      const double nu = std::sqrt(squared_norm(u.view()));
      const double eps = p % 2 ? 1e-1 : 1e-2;
      WeightVector w = r.weight;
      for (std::size_t k = 0; k < 4; ++k) w[k] += eps * u[k] / nu;
      CHECK(best <= primal_objective(d, proto, cfg.C, w) + 1e-8);
    }

    const SolveResult again = train_adaptive_svm(d, proto, cfg);
    CHECK(again.weight == r.weight);
    CHECK(again.primal_objective == r.primal_objective);
  }
}

TEST_CASE("MT prototype closed form matches per-coordinate minimization") {
  const std::vector<WeightVector> ws{WeightVector(std::vector<double>{2, 0}),
                                     WeightVector(std::vector<double>{0, 2})};
  const WeightVector w0 = mt_prototype_update(ws);
  for (std::size_t k = 0; k < 2; ++k) {
    // The objective separates over coordinates.
    auto f = [&](double v) {
      double s = v * v;
      for (const auto& w : ws) s += (w[k] - v) * (w[k] - v) / 2.0;
      return s;
    };
    CHECK(w0[k] == doctest::Approx(oracle::ternary_search(f, -10.0, 10.0)).epsilon(1e-6));
  }
  CHECK(w0[0] == doctest::Approx(0.5));
  CHECK(w0[1] == doctest::Approx(0.5));
}

TEST_CASE("MT objective never increases across rounds") {
  const auto data = fixtures::synth(fixtures::chain_spec(4, 9));
  for (double C : {0.1, 10.0, 1000.0}) {
    SolverConfig cfg;
    cfg.C = C;
    const MtResult r = train_mt_joint(data.first, cfg);
    REQUIRE(r.objective_history.size() >= 2);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
    }
    CHECK(mt_objective(data.first, r.prototype, r.weights, C) ==
          doctest::Approx(r.objective_history.back()));
  }
}

TEST_CASE("MT with a single task") {
  const auto data = fixtures::synth(fixtures::chain_spec(1, 4));
  SolverConfig cfg;
  cfg.C = 10.0;
  const MtResult r = train_mt_joint(data.first, cfg);
  CHECK(r.converged);
  const double expected = squared_norm(r.prototype.view()) +
                          primal_objective(data.first[0], r.prototype, cfg.C, r.weights[0]);
  CHECK(mt_objective(data.first, r.prototype, r.weights, cfg.C) == doctest::Approx(expected));
  for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
    CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
  }
}

TEST_CASE("MT on identical task copies") {
  const auto data = fixtures::synth(fixtures::chain_spec(1, 6));
  const std::vector<TaskDataset> copies(3, data.first[0]);
  SolverConfig cfg;
  cfg.C = 10.0;
  const MtResult r = train_mt_joint(copies, cfg);
  for (std::size_t i = 1; i < copies.size(); ++i) {
    CHECK(norm_diff(r.weights[i], r.weights[0]) <= 1e-3);
  }
  const SolveResult ind = train_linear_svm(copies[0], cfg);
  CHECK(error_rate(r.weights[0], copies[0]) <= error_rate(ind.weight, copies[0]));
}
