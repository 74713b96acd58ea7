#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "seqcurl/io.hpp"
#include "seqcurl/random.hpp"
#include "seqcurl/types.hpp"

namespace fixtures {

inline seqcurl::TaskDataset make_task(const std::vector<std::vector<double>>& rows,
                                      const std::vector<int>& labels, const char* id = "t") {
  std::vector<double> f;
  for (const auto& r : rows) f.insert(f.end(), r.begin(), r.end());
  return seqcurl::TaskDataset(std::move(f), labels, rows.front().size(), id, id);
}

/// Toy task: (1,0,+1), (-1,0,-1), (0,1,+1) with a bias column.
inline seqcurl::TaskDataset toy_task() {
  return make_task({{1, 0, 1}, {-1, 0, 1}, {0, 1, 1}}, {1, -1, 1}, "toy");
}

/// Preprocessed synthetic collection, as loaded from disk.
inline seqcurl::RepeatData synth(const seqcurl::SynthSpec& spec) {
  auto raw = seqcurl::synth_tasks(spec);
  seqcurl::RepeatData out;
  for (const auto& t : raw.first) out.first.push_back(seqcurl::preprocess(t, {}));
  for (const auto& t : raw.second) out.second.push_back(seqcurl::preprocess(t, {}));
  return out;
}

inline seqcurl::SynthSpec chain_spec(std::size_t n, std::uint64_t seed, double degrees = 10.0) {
  seqcurl::SynthSpec s;
  s.n_tasks = n;
  s.groups = {n};
  s.dimension = 10;
  s.rotation_step = degrees * M_PI / 180.0;
  s.train_per_task = 20;
  s.test_per_task = 50;
  s.label_noise = 0.05;
  s.seed = seed;
  return s;
}

/// Random task with `m` points in `d` dims (the last coordinate is a bias of 1).
inline seqcurl::TaskDataset random_task(seqcurl::Rng& rng, std::size_t m, std::size_t d) {
  std::vector<double> f;
  std::vector<int> y;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k + 1 < d; ++k) f.push_back(rng.normal());
    f.push_back(1.0);
    y.push_back(rng.uniform() < 0.5 ? -1 : 1);
  }
  return seqcurl::TaskDataset(std::move(f), std::move(y), d, "rand", "rand");
}

}  // namespace fixtures
