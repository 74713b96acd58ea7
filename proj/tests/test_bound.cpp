#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "seqcurl/bound.hpp"
#include "seqcurl/curriculum.hpp"

using namespace seqcurl;

TEST_CASE("erf against the integration oracle") {
  CHECK(seqcurl::erf(0.0) == 0.0);
  // Frozen from 30-digit arithmetic.
  CHECK(seqcurl::erf(1.0) == doctest::Approx(0.8427007929497149).epsilon(1e-12));
  CHECK(std::abs(oracle::integrated_erf(1.0) - 0.8427007929497149) < 1e-10);
  double worst = 0.0;
  for (int i = 0; i <= 240; ++i) {
    const double z = -6.0 + 0.05 * i;
    worst = std::max(worst, std::abs(seqcurl::erf(z) - oracle::integrated_erf(z)));
    CHECK(seqcurl::erf(-z) == -seqcurl::erf(z));
  }
  CHECK(worst <= 1e-7);
  CHECK_THROWS_AS(seqcurl::erf(std::numeric_limits<double>::quiet_NaN()), InputError);
}

TEST_CASE("phi_bar values and shape") {
  CHECK(phi_bar(0.0) == 0.5);
  CHECK(phi_bar(8.0) < 1e-10);
  CHECK(phi_bar(8.0) > 0.0);
  CHECK(phi_bar(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-10));
  double prev = phi_bar(-6.0);
  for (int i = 1; i < 1000; ++i) {
    const double z = -6.0 + 12.0 * i / 999.0;
    const double v = phi_bar(z);
    CHECK(v < prev);
    CHECK(std::abs(v + phi_bar(-z) - 1.0) <= 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(phi_bar(std::numeric_limits<double>::quiet_NaN()), InputError);
}

TEST_CASE("gibbs training error") {
  const TaskDataset toy = fixtures::toy_task();
  CHECK(gibbs_training_error(WeightVector(3), toy) == 0.5);

  const TaskDataset one = fixtures::make_task({{3, 4}}, {1});
  const WeightVector w(std::vector<double>{3.0 / 5.0, 4.0 / 5.0});  // margin / ||x|| = 1
  CHECK(gibbs_training_error(w, one) == doctest::Approx(0.15865525393145705).epsilon(1e-10));

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const TaskDataset d = fixtures::random_task(rng, 7, 4);
    WeightVector u(4);
    for (std::size_t k = 0; k < 4; ++k) u[k] = rng.normal();
    std::vector<double> f = d.features();
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double c = 0.1 + 10.0 * rng.uniform();
      for (std::size_t k = 0; k < 4; ++k) f[j * 4 + k] *= c;
    }
    const TaskDataset scaled(f, d.labels(), 4);
    CHECK(std::abs(gibbs_training_error(u, d) - gibbs_training_error(u, scaled)) <= 1e-12);
  }

  const TaskDataset zero_row = fixtures::make_task({{0, 0}}, {1});
  CHECK_THROWS_AS(gibbs_training_error(WeightVector(2), zero_row), InputError);
  CHECK_THROWS_AS(gibbs_training_error(WeightVector(3), one), InputError);
}

TEST_CASE("complexity term") {
  const WeightVector a(std::vector<double>{1, 0});
  CHECK(complexity_term(a, a, 4.0) == 0.0);
  CHECK(complexity_term(a, WeightVector(2), 1.0) == doctest::Approx(0.5));
  CHECK(complexity_term(WeightVector(std::vector<double>{3, 4}), WeightVector(2), 25.0) ==
        doctest::Approx(2.5));
  // KL(N(w, I) || N(w', I)) = ||w - w'||^2 / 2.
  const WeightVector b(std::vector<double>{-0.5, 2.0, 1.0});
  const WeightVector c(std::vector<double>{0.25, -1.0, 3.0});
  double kl = 0.0;
  for (std::size_t k = 0; k < 3; ++k) kl += 0.5 * (b[k] - c[k]) * (b[k] - c[k]);
  CHECK(complexity_term(b, c, 1.0) == doctest::Approx(kl).epsilon(1e-15));
  CHECK_THROWS_AS(complexity_term(a, WeightVector(3), 1.0), InputError);
}

TEST_CASE("harmonic mean") {
  CHECK(harmonic_mean(std::vector<std::size_t>{7, 7, 7}) == doctest::Approx(7.0));
  CHECK(harmonic_mean(std::vector<std::size_t>{2, 6}) == doctest::Approx(3.0));
  for (std::size_t k = 1; k < 50; ++k) {
    const double h = harmonic_mean(std::vector<std::size_t>{1, k});
    CHECK(h == doctest::Approx(2.0 * k / (k + 1.0)));
    CHECK(h < 2.0);
  }
  CHECK_THROWS_AS(harmonic_mean(std::vector<std::size_t>{}), InputError);
  CHECK_THROWS_AS(harmonic_mean(std::vector<std::size_t>{0, 2}), InputError);
}

TEST_CASE("task score modes") {
  const TaskDataset toy = fixtures::toy_task();
  BoundConfig both;
  CHECK(task_score(WeightVector(3), WeightVector(3), toy, 3.0, both) == 0.5);

  // Toy optimum with prototype (0.5, 0, 0), scored against w_prev = 0 and m_bar = 3.
  const WeightVector w(std::vector<double>{5.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0});
  CHECK(task_score(w, WeightVector(3), toy, 3.0, both) ==
        doctest::Approx(0.53825897197739).epsilon(1e-10));

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    WeightVector u(3), v(3);
    for (std::size_t k = 0; k < 3; ++k) {
      u[k] = rng.normal();
      v[k] = rng.normal();
    }
    const double e = task_score(u, v, toy, 5.0, {0.01, AblationMode::ErrorOnly});
    const double c = task_score(u, v, toy, 5.0, {0.01, AblationMode::ComplexityOnly});
    CHECK(e + c == doctest::Approx(task_score(u, v, toy, 5.0, both)).epsilon(1e-14));
  }
}

TEST_CASE("bound for a single untrained task") {
  const TaskDataset one = fixtures::make_task({{1.0}}, {1});
  BoundConfig cfg;
  cfg.delta = std::exp(-1.0);
  const std::vector<WeightVector> weights{WeightVector(1)};
  const BoundBreakdown b =
      bound_rhs(weights, Curriculum::single_sequence({0}), std::vector<TaskDataset>{one}, cfg);
  CHECK(b.per_task_error_terms.at(0) == 0.5);
  CHECK(b.per_task_complexity_terms.at(0) == 0.0);
  CHECK(std::abs(b.constant_terms - 1.125) <= 1e-12);
  CHECK(std::abs(b.total - 1.625) <= 1e-12);
}

TEST_CASE("bound recomposition and constants") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    std::vector<TaskDataset> tasks;
    std::vector<WeightVector> weights;
    for (std::size_t i = 0; i < n; ++i) {
      tasks.push_back(fixtures::random_task(rng, 1 + rng.below(9), 3));
      WeightVector w(3);
      for (std::size_t k = 0; k < 3; ++k) w[k] = rng.normal();
      weights.push_back(w);
    }
    BoundConfig cfg;
    cfg.delta = 0.001 + 0.998 * rng.uniform();
    const Curriculum c = Curriculum::single_sequence(rng.permutation(n));
    const BoundBreakdown b = bound_rhs(weights, c, tasks, cfg);
    double es = 0.0, cs = 0.0;
    for (double e : b.per_task_error_terms) {
      CHECK(e >= 0.0);
      CHECK(e <= 1.0);
      es += e;
    }
    for (double x : b.per_task_complexity_terms) {
      CHECK(x >= 0.0);
      cs += x;
    }
    CHECK(b.total == es / n + cs / n + b.constant_terms);
    CHECK(b.total >= es / n);

    // Constants do not depend on the order.
    const Curriculum other = Curriculum::single_sequence(rng.permutation(n));
    CHECK(bound_rhs(weights, other, tasks, cfg).constant_terms == b.constant_terms);
  }
}

TEST_CASE("subsequence bound uses log 2n and the zero prototype at restarts") {
  const auto data = fixtures::synth(fixtures::chain_spec(3, 12));
  std::vector<WeightVector> weights;
  Rng rng(1);
  for (int i = 0; i < 3; ++i) {
    WeightVector w(data.first[0].dim());
    for (auto& c : w.coefficients) c = rng.normal();
    weights.push_back(w);
  }
  Curriculum c;
  c.order = {2, 0, 1};
  c.transfer_sources = {std::nullopt, std::nullopt, 0};
  c.multi_subsequence = true;
  const BoundConfig cfg;
  const BoundBreakdown b = bound_rhs(weights, c, data.first, cfg);
  const double m = harmonic_mean(data.first);
  CHECK(b.constant_terms == doctest::Approx(1.0 / (8 * std::sqrt(m)) -
                                            std::log(cfg.delta) / (3 * std::sqrt(m)) +
                                            std::log(6.0) / std::sqrt(m)));
  CHECK(b.per_task_complexity_terms[1] ==
        doctest::Approx(complexity_term(weights[0], WeightVector(weights[0].dim()), m)));
  CHECK(b.per_task_complexity_terms[2] ==
        doctest::Approx(complexity_term(weights[1], weights[0], m)));
}

TEST_CASE("bound input validation") {
  const auto data = fixtures::synth(fixtures::chain_spec(2, 1));
  const std::vector<WeightVector> one{WeightVector(data.first[0].dim())};
  CHECK_THROWS_AS(bound_rhs(one, Curriculum::single_sequence({0, 1}), data.first, BoundConfig{}),
                  InputError);
  BoundConfig bad;
  bad.delta = 1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
}
