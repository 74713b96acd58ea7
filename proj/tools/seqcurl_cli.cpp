// Command-line front end: train, order, enumerate, experiment, cv, synth.
//
// Exit codes: 0 success, 1 input or parse error, 2 refused by a guard,
// 3 solver non-convergence under --strict.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqcurl/curriculum.hpp"
#include "seqcurl/eval.hpp"
#include "seqcurl/io.hpp"

namespace {

using namespace seqcurl;
using nlohmann::json;

constexpr int kExitInput = 1;
constexpr int kExitGuard = 2;
constexpr int kExitNonConvergence = 3;

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_order(const std::string& text, std::size_t n) {
  std::vector<std::size_t> order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const long v = std::stol(item);
      if (v < 1) throw InputError("order entries are 1-based task numbers");
      order.push_back(static_cast<std::size_t>(v - 1));
    } catch (const std::logic_error&) {
      throw InputError("malformed --order entry '" + item + "'");
    }
  }
  Curriculum::single_sequence(order).validate(n);
  return order;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw InputError("malformed --grid entry '" + item + "'");
    }
  }
  return grid;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
}

void print_order(const CurriculumResult& r) {
  std::cout << "order:";
  for (std::size_t t : r.curriculum.order) std::cout << ' ' << t + 1;
  std::cout << "\nsources:";
  for (const auto& s : r.curriculum.transfer_sources) {
    std::cout << ' ' << (s ? std::to_string(*s + 1) : std::string("-"));
  }
  std::cout << "\nscores:";
  for (double s : r.scores) std::cout << ' ' << format_double(s);
  std::cout << "\nbound_total: " << format_double(r.bound.total) << "\n";
}

void check_converged(bool converged, bool strict) {
  if (converged) return;
  if (strict) throw NonConvergence("solver did not reach the duality-gap tolerance");
  std::cerr << "warning: solver did not reach the duality-gap tolerance on every solve\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential multi-task learning with bound-driven task order selection"};
  app.require_subcommand(1);
  bool strict = false;
  app.add_flag("--strict", strict, "Exit with code 3 when any solve fails to converge");

  std::string manifest, method_name, out, order_text, ablation = "both", config_path, grid_text,
                                                       spec_path, out_dir;
  double C = 1.0;
  double p_new = 0.5;
  std::uint64_t seed = 0;
  std::size_t max_n = kDefaultEnumerationCap;

  auto* train = app.add_subcommand("train", "Train one method at a fixed C and evaluate it");
  train->add_option("--manifest", manifest)->required();
  train->add_option("--method", method_name)->required();
  train->add_option("--C", C)->required();
  train->add_option("--order", order_text, "1-based task order, e.g. \"3,1,2\"");
  train->add_option("--p-new", p_new);
  train->add_option("--seed", seed);
  train->add_option("--out", out)->required();

  auto* order = app.add_subcommand("order", "Select a task order and report per-step scores");
  order->add_option("--manifest", manifest)->required();
  order->add_option("--method", method_name)
      ->required()
      ->check(CLI::IsMember({"seqmt", "multiseqmt", "diversity"}, CLI::ignore_case));
  order->add_option("--C", C)->required();
  order->add_option("--ablation", ablation)->check(CLI::IsMember({"both", "error", "compl"}));
  order->add_option("--out", out)->required();

  auto* enumerate = app.add_subcommand("enumerate", "Train and bound every task order");
  enumerate->add_option("--manifest", manifest)->required();
  enumerate->add_option("--C", C)->required();
  enumerate->add_option("--max-n", max_n);
  enumerate->add_option("--out", out)->required();

  auto* experiment = app.add_subcommand("experiment", "Run a repeated, cross-validated experiment");
  experiment->add_option("--manifest", manifest)->required();
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--out", out)->required();

  auto* cv = app.add_subcommand("cv", "Cross-validate C for one method");
  cv->add_option("--manifest", manifest)->required();
  cv->add_option("--method", method_name)->required();
  cv->add_option("--grid", grid_text, "Comma-separated, strictly increasing C values");
  cv->add_option("--order", order_text, "1-based task order for the Semantic method");
  cv->add_option("--seed", seed);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic task collection");
  synth->add_option("--spec", spec_path)->required();
  synth->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (train->parsed()) {
      const TaskCollection data = load_task_collection(manifest);
      ExperimentConfig cfg;
      cfg.method = parse_method(method_name);
      cfg.p_new = p_new;
      if (!order_text.empty()) cfg.semantic_order = parse_order(order_text, data.train.size());
      cfg.validate(data.train.size());
      const MethodOutput m = run_method(cfg.method, data.train, C, cfg, seed);
      json errors = json::array();
      double sum = 0.0;
      for (std::size_t t = 0; t < data.test.size(); ++t) {
        const double e = error_rate(m.weights[t], data.test[t]);
        errors.push_back(e);
        sum += e;
      }
      json weights = json::array();
      for (const auto& w : m.weights) weights.push_back(w.coefficients);
      json doc = {{"method", std::string(to_string(cfg.method))},
                  {"C", C},
                  {"seed", seed},
                  {"weights", weights},
                  {"test_errors", errors},
                  {"mean_test_error", sum / static_cast<double>(data.test.size())},
                  {"converged", m.converged}};
      if (m.curriculum) doc["curriculum"] = to_json(*m.curriculum);
      write_text(out, doc.dump(2) + "\n");
      std::cout << "mean_test_error: " << format_double(doc["mean_test_error"].get<double>())
                << "\n";
      check_converged(m.converged, strict);
    } else if (order->parsed()) {
      const TaskCollection data = load_task_collection(manifest);
      SolverConfig solver;
      solver.C = C;
      const BoundConfig bound{0.01, parse_ablation_mode(ablation)};
      const Method method = parse_method(method_name);
      const CurriculumResult r = method == Method::SeqMT      ? seqmt(data.train, solver, bound)
                                 : method == Method::MultiSeqMT ? multi_seqmt(data.train, solver, bound)
                                                                : diversity_order(data.train, solver, bound);
      write_text(out, to_json(r).dump(2) + "\n");
      print_order(r);
      check_converged(r.converged, strict);
    } else if (enumerate->parsed()) {
      const TaskCollection data = load_task_collection(manifest);
      SolverConfig solver;
      solver.C = C;
      const auto entries = enumerate_orders(data.train, solver, BoundConfig{}, data.test, max_n);
      export_enumeration(entries, out, format_for_path(out));
      std::cout << "orders: " << entries.size() << "\n";
    } else if (experiment->parsed()) {
      const TaskCollection data = load_task_collection(manifest);
      const ExperimentConfig cfg = experiment_config_from_json(read_json(config_path));
      const ExperimentReport report = run_experiment(data.train, data.test, cfg);
      export_report(report, out, format_for_path(out));
      std::cout << to_string(report.method) << " mean_error: " << format_double(report.mean_error)
                << " sem: " << format_double(report.sem) << "\n";
      check_converged(report.converged, strict);
    } else if (cv->parsed()) {
      const TaskCollection data = load_task_collection(manifest);
      ExperimentConfig cfg;
      cfg.method = parse_method(method_name);
      if (!grid_text.empty()) cfg.c_grid = parse_grid(grid_text);
      if (!order_text.empty()) cfg.semantic_order = parse_order(order_text, data.train.size());
      const CvResult r = cross_validate_C(data.train, cfg, seed);
      for (std::size_t i = 0; i < r.validation_error.size(); ++i) {
        std::cout << "C=" << format_double(cfg.c_grid[i])
                  << " validation_error=" << format_double(r.validation_error[i]) << "\n";
      }
      if (!r.stratified) std::cerr << "warning: folds are not stratified\n";
      std::cout << "selected_C: " << format_double(r.selected_C) << "\n";
    } else if (synth->parsed()) {
      const SynthSpec spec = synth_spec_from_json(read_json(spec_path));
      const auto m = synth_generate(spec, out_dir);
      std::cout << "wrote " << m.tasks.size() << " tasks to " << out_dir << "\n";
    }
  } catch (const GuardError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitGuard;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
