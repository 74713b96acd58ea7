#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "seqcurl/curriculum.hpp"
#include "seqcurl/eval.hpp"
#include "seqcurl/types.hpp"

namespace seqcurl {

struct Preprocessing {
  bool l2_normalize = true;
  bool append_bias = true;
};

/// Row-wise L2 normalization (zero rows are left as they are), then a constant
/// 1 appended as the bias coordinate. Normalization always comes first.
TaskDataset preprocess(const TaskDataset& data, const Preprocessing& flags);

enum class SampleFormat { Dense, Sparse };

struct ManifestTask {
  std::string task_id;
  std::string name;
  std::string train_path;  // relative paths resolve against the manifest's directory
  std::string test_path;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

struct TaskCollectionManifest {
  int version = 1;
  std::size_t dimension = 0;  // raw dimension, before the bias coordinate
  Preprocessing preprocessing;
  SampleFormat format = SampleFormat::Dense;
  std::vector<ManifestTask> tasks;
};

struct TaskCollection {
  TaskCollectionManifest manifest;
  std::vector<TaskDataset> train;
  std::vector<TaskDataset> test;
};

TaskCollectionManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const TaskCollectionManifest& manifest, const std::filesystem::path& path);

/// Dense rows: "label, v1, ..., vd". Blank lines are skipped.
TaskDataset parse_dense(std::string_view text, std::size_t dimension,
                        const std::string& source = "<memory>");
/// Sparse rows: "label i:v i:v ..." with 1-based indices no larger than `dimension`.
TaskDataset parse_sparse(std::string_view text, std::size_t dimension,
                         const std::string& source = "<memory>");

TaskDataset load_samples(const std::filesystem::path& path, SampleFormat format,
                         std::size_t dimension);

/// Loads and preprocesses every task in the manifest. Errors are ParseError
/// naming the offending file (and line, for row-level problems).
TaskCollection load_task_collection(const std::filesystem::path& manifest_path);

/// Shortest decimal that reads back to the same double; integral values keep a
/// trailing ".0".
std::string format_double(double value);

std::string to_dense_csv(const TaskDataset& data);

struct SynthSpec {
  std::size_t n_tasks = 6;
  std::vector<std::size_t> groups{6};
  std::size_t dimension = 10;
  double rotation_step = 0.0;  // radians between consecutive tasks of a group
  std::size_t train_per_task = 20;
  std::size_t test_per_task = 200;
  double label_noise = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& spec);

/// Raw (unpreprocessed) synthetic tasks, listed group by group in rotation order.
RepeatData synth_tasks(const SynthSpec& spec);

/// Index of the group each synthetic task belongs to.
std::vector<std::size_t> synth_group_of_task(const SynthSpec& spec);

/// Writes one dense train and test file per task plus manifest.json into
/// `out_dir`, and returns the manifest.
TaskCollectionManifest synth_generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

enum class ExportFormat { Json, Csv };
/// ".json" selects JSON, anything else CSV.
ExportFormat format_for_path(const std::filesystem::path& path);

// External representations use 1-based task numbers.
nlohmann::json to_json(const Curriculum& c);
Curriculum curriculum_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoundBreakdown& b);
BoundBreakdown bound_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CurriculumResult& result);
nlohmann::json to_json(const std::vector<OrderEntry>& entries);

/// Flat rows "repeat,task,task_id,error" followed by summary rows
/// "mean_error,<v>" and "sem,<v>".
std::string report_to_csv(const ExperimentReport& report);
/// Header "order,bound_total,mean_test_error" then one row per permutation;
/// the order column is space-separated 1-based task numbers.
std::string enumeration_to_csv(const std::vector<OrderEntry>& entries);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

void export_report(const ExperimentReport& report, const std::filesystem::path& path,
                   ExportFormat format);
void export_enumeration(const std::vector<OrderEntry>& entries, const std::filesystem::path& path,
                        ExportFormat format);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace seqcurl
