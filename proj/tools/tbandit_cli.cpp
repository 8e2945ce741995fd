#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbandit/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 1;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tbandit;

  CLI::App app{"Thresholding bandits: characteristic times and identification experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  double report_delta = 0.0;

  auto* complexity = app.add_subcommand("complexity", "Characteristic time report (JSON)");
  complexity->add_option("config", config_path, "Experiment config (JSON)")->required();
  complexity->add_option("--delta", report_delta, "Risk used in the report (default: config)");

  auto* weights = app.add_subcommand("weights", "Optimal sampling weights (JSON)");
  weights->add_option("config", config_path, "Experiment config (JSON)")->required();

  bool raw = false;
  std::size_t parallelism = 0;
  auto* run = app.add_subcommand("run", "Monte-Carlo experiment, summary CSV");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_flag("--raw", raw, "Emit one row per replication instead of the summary");
  run->add_option("--out", out_path, "Write to this file instead of stdout");
  run->add_option("--parallelism", parallelism, "Worker threads (default: config, then TBANDIT_THREADS)")
      ->check(CLI::PositiveNumber);

  std::vector<double> sweep_mu;
  std::string sweep_setting = "Increasing";
  double smin = 0.0, smax = 0.0, step = 0.0;
  auto* sweep = app.add_subcommand("sweep", "Inverse characteristic time along a threshold grid (CSV)");
  sweep->add_option("--mu", sweep_mu, "Arm means, comma separated")->required()->delimiter(',');
  sweep->add_option("--setting", sweep_setting, "NonMonotonic, Increasing or BelowThreshold");
  sweep->add_option("--smin", smin, "First threshold")->required();
  sweep->add_option("--smax", smax, "Last threshold")->required();
  sweep->add_option("--step", step, "Grid step")->required();
  sweep->add_option("--out", out_path, "Write to this file instead of stdout");

  std::uint64_t table_reps = 10000;
  std::uint64_t table_seed = 1;
  std::string raw_path;
  auto* table1 = app.add_subcommand("table1", "Both reference problems, all algorithms (CSV)");
  table1->add_option("--replications", table_reps, "Replications per algorithm")
      ->check(CLI::PositiveNumber);
  table1->add_option("--seed", table_seed, "Master seed");
  table1->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  table1->add_option("--out", out_path, "Write the summary here instead of stdout");
  table1->add_option("--raw", raw_path, "Also write per-replication rows to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*complexity) {
      const ExperimentConfig config = load_config(config_path);
      const double delta = report_delta > 0.0 ? report_delta : config.delta;
      std::cout << complexity_report(config.instance, delta).dump(2) << '\n';
    } else if (*weights) {
      const ExperimentConfig config = load_config(config_path);
      const ComplexitySolution sol = solve_complexity(config.instance);
      nlohmann::json out;
      out["setting"] = std::string(to_string(config.instance.setting()));
      out["weights"] = sol.weights;
      std::cout << out.dump(2) << '\n';
    } else if (*run) {
      const ExperimentConfig config = load_config(config_path);
      const ExperimentResult result = run_experiment(config, parallelism);
      emit(raw ? raw_csv(config, result.trials) : summary_csv(result.summaries), out_path);
    } else if (*sweep) {
      Setting setting;
      std::vector<double> grid;
      try {
        setting = parse_setting(sweep_setting);
        grid = threshold_grid(smin, smax, step);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
      }
      emit(sweep_csv(curve_sweep(sweep_mu, setting, grid)), out_path);
    } else if (*table1) {
      std::string summary(kSummaryHeader);
      summary += '\n';
      std::string rows;
      if (!raw_path.empty()) rows = std::string(kRawHeader) + '\n';
      for (const ExperimentConfig& config : table1_configs(table_reps, table_seed)) {
        const ExperimentResult result = run_experiment(config, parallelism);
        summary += summary_csv_rows(result.summaries);
        if (!raw_path.empty()) rows += raw_csv_rows(config, result.trials);
        std::cerr << "problem " << config.problem_id << ' ' << to_string(config.instance.setting())
                  << " done\n";
      }
      emit(summary, out_path);
      if (!raw_path.empty()) emit(rows, raw_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
