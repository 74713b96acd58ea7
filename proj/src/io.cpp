#include "seqcurl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "seqcurl/random.hpp"

namespace seqcurl {

namespace fs = std::filesystem;
using nlohmann::json;

TaskDataset preprocess(const TaskDataset& data, const Preprocessing& flags) {
  const std::size_t d = data.dim();
  const std::size_t out_dim = flags.append_bias ? d + 1 : d;
  std::vector<double> features;
  features.reserve(data.size() * out_dim);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto x = data.row(j);
    double scale = 1.0;
    if (flags.l2_normalize) {
      const double norm = std::sqrt(squared_norm(x));
      if (norm > 0.0) scale = 1.0 / norm;
    }
    for (double v : x) features.push_back(v * scale);
    if (flags.append_bias) features.push_back(1.0);
  }
  return TaskDataset(std::move(features), data.labels(), out_dim, data.task_id(), data.name());
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view token, const std::string& source, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    fail(source, line, "malformed number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) fail(source, line, "non-finite value '" + std::string(token) + "'");
  return value;
}

int parse_label(std::string_view token, const std::string& source, std::size_t line) {
  const double v = parse_number(token, source, line);
  if (v != 1.0 && v != -1.0) {
    fail(source, line, "label must be -1 or +1, got '" + std::string(trim(token)) + "'");
  }
  return v > 0 ? 1 : -1;
}

template <class RowFn>
void for_each_row(std::string_view text, RowFn&& fn) {
  std::size_t line = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view row = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line;
    row = trim(row);
    if (row.empty()) continue;
    fn(row, line);
  }
}

TaskDataset finish(std::vector<double> features, std::vector<int> labels, std::size_t dimension,
                   const std::string& source) {
  if (labels.empty()) throw ParseError(source + ": no samples");
  return TaskDataset(std::move(features), std::move(labels), dimension);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TaskDataset parse_dense(std::string_view text, std::size_t dimension, const std::string& source) {
  std::vector<double> features;
  std::vector<int> labels;
  for_each_row(text, [&](std::string_view row, std::size_t line) {
    std::size_t fields = 0;
    while (true) {
      const auto comma = row.find(',');
      const std::string_view token = row.substr(0, comma);
      if (fields == 0) {
        labels.push_back(parse_label(token, source, line));
      } else {
        if (fields > dimension) {
          fail(source, line, "more than " + std::to_string(dimension) + " feature columns");
        }
        features.push_back(parse_number(token, source, line));
      }
      ++fields;
      if (comma == std::string_view::npos) break;
      row.remove_prefix(comma + 1);
    }
    if (fields - 1 != dimension) {
      fail(source, line,
           "expected " + std::to_string(dimension) + " features, found " +
               std::to_string(fields - 1));
    }
  });
  return finish(std::move(features), std::move(labels), dimension, source);
}

TaskDataset parse_sparse(std::string_view text, std::size_t dimension, const std::string& source) {
  std::vector<double> features;
  std::vector<int> labels;
  for_each_row(text, [&](std::string_view row, std::size_t line) {
    std::vector<double> x(dimension, 0.0);
    std::vector<bool> seen(dimension, false);
    bool first = true;
    while (!row.empty()) {
      const auto end = row.find_first_of(" \t");
      const std::string_view token = row.substr(0, end);
      row = end == std::string_view::npos ? std::string_view{} : trim(row.substr(end));
      if (first) {
        labels.push_back(parse_label(token, source, line));
        first = false;
        continue;
      }
      const auto colon = token.find(':');
      if (colon == std::string_view::npos) {
        fail(source, line, "expected index:value, got '" + std::string(token) + "'");
      }
      const std::string_view idx_text = token.substr(0, colon);
      std::size_t idx = 0;
      const auto [ptr, ec] =
          std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      if (idx_text.empty() || ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
        fail(source, line, "malformed index '" + std::string(idx_text) + "'");
      }
      if (idx < 1 || idx > dimension) {
        fail(source, line,
             "index " + std::to_string(idx) + " outside 1.." + std::to_string(dimension));
      }
      if (seen[idx - 1]) fail(source, line, "duplicate index " + std::to_string(idx));
      seen[idx - 1] = true;
      x[idx - 1] = parse_number(token.substr(colon + 1), source, line);
    }
    features.insert(features.end(), x.begin(), x.end());
  });
  return finish(std::move(features), std::move(labels), dimension, source);
}

TaskDataset load_samples(const fs::path& path, SampleFormat format, std::size_t dimension) {
  const std::string text = read_file(path);
  return format == SampleFormat::Dense ? parse_dense(text, dimension, path.string())
                                       : parse_sparse(text, dimension, path.string());
}

TaskCollectionManifest read_manifest(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  TaskCollectionManifest m;
  try {
    m.version = j.at("version").get<int>();
    m.dimension = j.at("dimension").get<std::size_t>();
    if (j.contains("preprocessing")) {
      const auto& p = j.at("preprocessing");
      m.preprocessing.l2_normalize = p.value("l2_normalize", true);
      m.preprocessing.append_bias = p.value("append_bias", true);
    }
    const std::string format = j.value("format", std::string("dense"));
    if (format == "dense") {
      m.format = SampleFormat::Dense;
    } else if (format == "sparse") {
      m.format = SampleFormat::Sparse;
    } else {
      throw ParseError(path.string() + ": unknown sample format '" + format + "'");
    }
    for (const auto& t : j.at("tasks")) {
      ManifestTask task;
      task.task_id = t.at("task_id").get<std::string>();
      task.name = t.value("name", task.task_id);
      task.train_path = t.at("train_path").get<std::string>();
      task.test_path = t.at("test_path").get<std::string>();
      if (t.contains("sample_counts")) {
        task.train_count = t.at("sample_counts").value("train", std::size_t{0});
        task.test_count = t.at("sample_counts").value("test", std::size_t{0});
      }
      m.tasks.push_back(std::move(task));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": invalid manifest: " + e.what());
  }
  if (m.dimension == 0) throw ParseError(path.string() + ": dimension must be >= 1");
  if (m.tasks.empty()) throw ParseError(path.string() + ": manifest lists no tasks");
  for (std::size_t a = 0; a < m.tasks.size(); ++a) {
    for (std::size_t b = a + 1; b < m.tasks.size(); ++b) {
      if (m.tasks[a].task_id == m.tasks[b].task_id) {
        throw ParseError(path.string() + ": duplicate task_id '" + m.tasks[a].task_id + "'");
      }
    }
  }
  return m;
}

void write_manifest(const TaskCollectionManifest& m, const fs::path& path) {
  json tasks = json::array();
  for (const auto& t : m.tasks) {
    tasks.push_back({{"task_id", t.task_id},
                     {"name", t.name},
                     {"train_path", t.train_path},
                     {"test_path", t.test_path},
                     {"sample_counts", {{"train", t.train_count}, {"test", t.test_count}}}});
  }
  const json j = {
      {"version", m.version},
      {"dimension", m.dimension},
      {"format", m.format == SampleFormat::Dense ? "dense" : "sparse"},
      {"preprocessing",
       {{"l2_normalize", m.preprocessing.l2_normalize},
        {"append_bias", m.preprocessing.append_bias}}},
      {"tasks", tasks},
  };
  write_text(path, j.dump(2) + "\n");
}

TaskCollection load_task_collection(const fs::path& manifest_path) {
  TaskCollection c;
  c.manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  auto load = [&](const std::string& rel, std::size_t expected, const ManifestTask& t) {
    const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
    if (!fs::exists(p)) throw ParseError(p.string() + ": file not found");
    TaskDataset raw = load_samples(p, c.manifest.format, c.manifest.dimension);
    if (expected != 0 && raw.size() != expected) {
      throw ParseError(p.string() + ": expected " + std::to_string(expected) + " samples, found " +
                       std::to_string(raw.size()));
    }
    raw = TaskDataset(raw.features(), raw.labels(), raw.dim(), t.task_id, t.name);
    return preprocess(raw, c.manifest.preprocessing);
  };
  for (const auto& t : c.manifest.tasks) {
    c.train.push_back(load(t.train_path, t.train_count, t));
    c.test.push_back(load(t.test_path, t.test_count, t));
  }
  return c;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string to_dense_csv(const TaskDataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.size(); ++j) {
    out += data.label(j) > 0 ? "+1" : "-1";
    for (double v : data.row(j)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void SynthSpec::validate() const {
  std::size_t total = 0;
  for (std::size_t g : groups) {
    if (g == 0) throw InputError("synth: group sizes must be >= 1");
    total += g;
  }
  if (groups.empty() || total != n_tasks) throw InputError("synth: group sizes must sum to n_tasks");
  if (!(rotation_step >= 0.0 && rotation_step <= std::numbers::pi / 2)) {
    throw InputError("synth: rotation_step must lie in [0, pi/2]");
  }
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw InputError("synth: label_noise must lie in [0, 0.5)");
  }
  if (train_per_task == 0 || test_per_task == 0) {
    throw InputError("synth: per-task sample counts must be >= 1");
  }
  if (dimension < 2 * groups.size()) {
    throw InputError("synth: dimension " + std::to_string(dimension) + " is too small for " +
                     std::to_string(groups.size()) + " orthogonal groups (need " +
                     std::to_string(2 * groups.size()) + ")");
  }
}

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s;
  try {
    s.n_tasks = j.at("n_tasks").get<std::size_t>();
    s.groups = j.value("groups", std::vector<std::size_t>{s.n_tasks});
    s.dimension = j.at("dimension").get<std::size_t>();
    s.rotation_step = j.value("rotation_step", 0.0);
    s.train_per_task = j.value("train_per_task", s.train_per_task);
    s.test_per_task = j.value("test_per_task", s.test_per_task);
    s.label_noise = j.value("label_noise", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const SynthSpec& s) {
  return {{"n_tasks", s.n_tasks},         {"groups", s.groups},
          {"dimension", s.dimension},     {"rotation_step", s.rotation_step},
          {"train_per_task", s.train_per_task}, {"test_per_task", s.test_per_task},
          {"label_noise", s.label_noise}, {"seed", s.seed}};
}

std::vector<std::size_t> synth_group_of_task(const SynthSpec& spec) {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) out.insert(out.end(), spec.groups[g], g);
  return out;
}

RepeatData synth_tasks(const SynthSpec& spec) {
  spec.validate();
  const std::size_t d = spec.dimension;
  Rng rng(spec.seed);

  // Orthonormal directions by Gram-Schmidt: two per group (base, rotation partner).
  std::vector<std::vector<double>> basis;
  while (basis.size() < 2 * spec.groups.size()) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    for (const auto& b : basis) {
      const double p = dot(v, b);
      for (std::size_t k = 0; k < d; ++k) v[k] -= p * b[k];
    }
    const double norm = std::sqrt(squared_norm(v));
    if (norm < 1e-8) continue;
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }

  auto sample = [&](const std::vector<double>& truth, std::size_t count, const std::string& id) {
    std::vector<double> features;
    std::vector<int> labels;
    for (std::size_t s = 0; s < count; ++s) {
      std::vector<double> x(d);
      double norm = 0.0;
      do {
        for (auto& v : x) v = rng.normal();
        norm = std::sqrt(squared_norm(x));
      } while (norm == 0.0);
      for (auto& v : x) v /= norm;
      int y = dot(truth, x) >= 0.0 ? 1 : -1;
      if (rng.uniform() < spec.label_noise) y = -y;
      features.insert(features.end(), x.begin(), x.end());
      labels.push_back(y);
    }
    return TaskDataset(std::move(features), std::move(labels), d, id, id);
  };

  RepeatData out;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& base = basis[2 * g];
    const auto& partner = basis[2 * g + 1];
    for (std::size_t i = 0; i < spec.groups[g]; ++i) {
      const double angle = static_cast<double>(i) * spec.rotation_step;
      std::vector<double> truth(d);
      for (std::size_t k = 0; k < d; ++k) {
        truth[k] = std::cos(angle) * base[k] + std::sin(angle) * partner[k];
      }
      const std::string id = "g" + std::to_string(g + 1) + "_t" + std::to_string(i + 1);
      out.first.push_back(sample(truth, spec.train_per_task, id));
      out.second.push_back(sample(truth, spec.test_per_task, id));
    }
  }
  return out;
}

TaskCollectionManifest synth_generate(const SynthSpec& spec, const fs::path& out_dir) {
  const RepeatData data = synth_tasks(spec);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error(out_dir.string() + ": " + ec.message());

  TaskCollectionManifest m;
  m.dimension = spec.dimension;
  for (std::size_t t = 0; t < data.first.size(); ++t) {
    ManifestTask task;
    task.task_id = data.first[t].task_id();
    task.name = data.first[t].name();
    task.train_path = task.task_id + "_train.csv";
    task.test_path = task.task_id + "_test.csv";
    task.train_count = data.first[t].size();
    task.test_count = data.second[t].size();
    write_text(out_dir / task.train_path, to_dense_csv(data.first[t]));
    write_text(out_dir / task.test_path, to_dense_csv(data.second[t]));
    m.tasks.push_back(std::move(task));
  }
  write_manifest(m, out_dir / "manifest.json");
  return m;
}

ExportFormat format_for_path(const fs::path& path) {
  return path.extension() == ".json" ? ExportFormat::Json : ExportFormat::Csv;
}

namespace {

json one_based(const std::vector<std::size_t>& order) {
  json a = json::array();
  for (std::size_t t : order) a.push_back(t + 1);
  return a;
}

std::vector<std::size_t> zero_based(const json& a) {
  std::vector<std::size_t> out;
  for (const auto& v : a) {
    const auto t = v.get<std::size_t>();
    if (t == 0) throw InputError("task numbers are 1-based");
    out.push_back(t - 1);
  }
  return out;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const Curriculum& c) {
  json sources = json::array();
  for (const auto& s : c.transfer_sources) sources.push_back(s ? json(*s + 1) : json(nullptr));
  return {{"order", one_based(c.order)},
          {"transfer_sources", sources},
          {"multi_subsequence", c.multi_subsequence}};
}

Curriculum curriculum_from_json(const json& j) {
  Curriculum c;
  c.order = zero_based(j.at("order"));
  for (const auto& s : j.at("transfer_sources")) {
    c.transfer_sources.push_back(s.is_null() ? std::nullopt
                                             : std::optional(s.get<std::size_t>() - 1));
  }
  c.multi_subsequence = j.value("multi_subsequence", false);
  return c;
}

json to_json(const BoundBreakdown& b) {
  return {{"bounded_quantity", "half_average_expected_error"},
          {"per_task_error_terms", b.per_task_error_terms},
          {"per_task_complexity_terms", b.per_task_complexity_terms},
          {"constant_terms", b.constant_terms},
          {"total", b.total},
          {"harmonic_mean_m", b.harmonic_mean_m},
          {"multi_subsequence", b.multi_subsequence}};
}

BoundBreakdown bound_from_json(const json& j) {
  BoundBreakdown b;
  b.per_task_error_terms = j.at("per_task_error_terms").get<std::vector<double>>();
  b.per_task_complexity_terms = j.at("per_task_complexity_terms").get<std::vector<double>>();
  b.constant_terms = j.at("constant_terms").get<double>();
  b.total = j.at("total").get<double>();
  b.harmonic_mean_m = j.at("harmonic_mean_m").get<double>();
  b.multi_subsequence = j.value("multi_subsequence", false);
  return b;
}

json to_json(const ExperimentReport& r) {
  json curricula = json::array();
  for (const auto& c : r.curricula) curricula.push_back(c ? to_json(*c) : json(nullptr));
  json bounds = json::array();
  for (const auto& b : r.bound_values) bounds.push_back(b ? to_json(*b) : json(nullptr));
  return {{"method", std::string(to_string(r.method))},
          {"task_ids", r.task_ids},
          {"per_repeat_task_errors", r.per_repeat_task_errors},
          {"mean_error", r.mean_error},
          {"sem", r.sem},
          {"selected_C", r.selected_C},
          {"curricula", curricula},
          {"bound_values", bounds},
          {"stratified_folds", r.stratified_folds},
          {"converged", r.converged}};
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  r.method = parse_method(j.at("method").get<std::string>());
  r.task_ids = j.at("task_ids").get<std::vector<std::string>>();
  r.per_repeat_task_errors = j.at("per_repeat_task_errors").get<std::vector<std::vector<double>>>();
  r.mean_error = j.at("mean_error").get<double>();
  r.sem = j.at("sem").get<double>();
  r.selected_C = j.at("selected_C").get<std::vector<double>>();
  for (const auto& c : j.at("curricula")) {
    r.curricula.push_back(c.is_null() ? std::nullopt : std::optional(curriculum_from_json(c)));
  }
  for (const auto& b : j.at("bound_values")) {
    r.bound_values.push_back(b.is_null() ? std::nullopt : std::optional(bound_from_json(b)));
  }
  r.stratified_folds = j.value("stratified_folds", true);
  r.converged = j.value("converged", true);
  return r;
}

json to_json(const CurriculumResult& result) {
  json weights = json::array();
  for (const auto& w : result.weights) weights.push_back(w.coefficients);
  return {{"curriculum", to_json(result.curriculum)},
          {"scores", result.scores},
          {"weights", weights},
          {"bound", to_json(result.bound)},
          {"converged", result.converged},
          {"solves", result.solves}};
}

json to_json(const std::vector<OrderEntry>& entries) {
  json a = json::array();
  for (const auto& e : entries) {
    a.push_back({{"order", one_based(e.order)},
                 {"bound_total", e.bound_total},
                 {"mean_test_error", nullable(e.mean_test_error)}});
  }
  return a;
}

std::string report_to_csv(const ExperimentReport& r) {
  std::string out = "repeat,task,task_id,error\n";
  for (std::size_t rep = 0; rep < r.per_repeat_task_errors.size(); ++rep) {
    const auto& row = r.per_repeat_task_errors[rep];
    for (std::size_t t = 0; t < row.size(); ++t) {
      out += std::to_string(rep + 1) + "," + std::to_string(t + 1) + "," +
             (t < r.task_ids.size() ? r.task_ids[t] : std::string()) + "," +
             format_double(row[t]) + "\n";
    }
  }
  out += "mean_error," + format_double(r.mean_error) + "\n";
  out += "sem," + format_double(r.sem) + "\n";
  return out;
}

std::string enumeration_to_csv(const std::vector<OrderEntry>& entries) {
  std::string out = "order,bound_total,mean_test_error\n";
  for (const auto& e : entries) {
    for (std::size_t i = 0; i < e.order.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(e.order[i] + 1);
    }
    out += "," + format_double(e.bound_total) + ",";
    if (e.mean_test_error) out += format_double(*e.mean_test_error);
    out += "\n";
  }
  return out;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.method = parse_method(j.at("method").get<std::string>());
    c.repeats = j.value("repeats", c.repeats);
    c.c_grid = j.value("c_grid", c.c_grid);
    c.cv_folds = j.value("cv_folds", c.cv_folds);
    c.cv_repeats = j.value("cv_repeats", c.cv_repeats);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("ablation_mode")) {
      c.ablation_mode = parse_ablation_mode(j.at("ablation_mode").get<std::string>());
    }
    if (j.contains("semantic_order") && !j.at("semantic_order").is_null()) {
      c.semantic_order = zero_based(j.at("semantic_order"));
    }
    c.p_new = j.value("p_new", c.p_new);
    c.delta = j.value("delta", c.delta);
    c.solver.tolerance = j.value("tolerance", c.solver.tolerance);
    c.solver.max_iterations = j.value("max_iterations", c.solver.max_iterations);
    c.solver.shuffle_seed = j.value("shuffle_seed", c.solver.shuffle_seed);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid experiment config: ") + e.what());
  }
  return c;
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void export_report(const ExperimentReport& report, const fs::path& path, ExportFormat format) {
  write_text(path, format == ExportFormat::Json ? to_json(report).dump(2) + "\n"
                                                : report_to_csv(report));
}

void export_enumeration(const std::vector<OrderEntry>& entries, const fs::path& path,
                        ExportFormat format) {
  write_text(path, format == ExportFormat::Json ? to_json(entries).dump(2) + "\n"
                                                : enumeration_to_csv(entries));
}

}  // namespace seqcurl
