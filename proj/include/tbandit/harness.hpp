#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tbandit/complexity.hpp"
#include "tbandit/core.hpp"
#include "tbandit/policies.hpp"

// Monte-Carlo experiments: configuration, replication runner and the flat
// outputs consumed by the CLI.
namespace tbandit {

/// Malformed or inconsistent experiment definition.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::DT;
  PolicyParams params;
};

struct ExperimentConfig {
  BanditInstance instance;
  std::vector<AlgorithmSpec> algorithms;
  double delta = 0.1;
  BetaKind beta_kind = BetaKind::Practical;
  std::uint64_t replications = 1;
  std::uint64_t master_seed = 0;
  std::size_t parallelism = 0;  // 0: use default_parallelism()
  std::string problem_id;
};

/// Strict JSON reader: unknown keys, wrong types and invalid values all raise
/// ConfigError. Layout:
///   {"instance": {"mu": [..], "threshold": S, "setting": "Increasing"},
///    "algorithms": [{"name": "DT"}, {"name": "APT", "epsilon": 0.01}],
///    "delta": 0.1, "beta_kind": "Practical", "replications": 1000,
///    "master_seed": 1, "parallelism": 4, "problem_id": "1"}
/// beta_kind, parallelism and problem_id are optional. DT accepts
/// "recompute_every".
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// TBANDIT_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
std::size_t default_parallelism();

struct TrialRecord {
  Algorithm algorithm = Algorithm::DT;
  std::uint64_t replication = 0;
  std::uint64_t tau = 0;
  std::size_t recommended = 0;  // 0-based
  bool correct = false;
  bool stopped = false;
  std::uint64_t seed = 0;
};

struct Summary {
  Algorithm algorithm = Algorithm::DT;
  Setting setting = Setting::Increasing;
  std::string problem_id;
  double delta = 0.0;
  std::uint64_t replications = 0;
  double mean_tau = 0.0;
  double stderr_tau = 0.0;  // sample standard deviation / sqrt(n)
  double error_rate = 0.0;
  std::uint64_t master_seed = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;  // grouped by algorithm, then replication
  std::vector<Summary> summaries;   // one per algorithm, config order
};

/// Runs every (algorithm, replication) pair on a worker pool. The result does
/// not depend on the number of workers. parallelism = 0 defers to the config,
/// then to default_parallelism().
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t parallelism = 0);

/// Aggregates the trials of one algorithm.
Summary summarize(const ExperimentConfig& config, Algorithm algorithm,
                  const std::vector<TrialRecord>& trials);

inline constexpr std::string_view kSummaryHeader =
    "algorithm,setting,problem_id,delta,replications,mean_tau,stderr_tau,error_rate,master_seed";
inline constexpr std::string_view kRawHeader =
    "algorithm,setting,problem_id,replication,tau,recommended,correct,stopped,seed";

/// Header line plus one row per summary.
std::string summary_csv(const std::vector<Summary>& summaries);
std::string summary_csv_rows(const std::vector<Summary>& summaries);
/// Header line plus one row per trial; arms are reported 1-based.
std::string raw_csv(const ExperimentConfig& config, const std::vector<TrialRecord>& trials);
std::string raw_csv_rows(const ExperimentConfig& config, const std::vector<TrialRecord>& trials);

/// T*, w*, T* log(1/delta), the lower bound T* kl(delta, 1-delta) and, where
/// defined, the three-point value and the gap bounds.
nlohmann::json complexity_report(const BanditInstance& instance, double delta);

struct SweepRow {
  double threshold = 0.0;
  double inverse_time = 0.0;  // 0 when the closest arm is tied
  Weights weights;
};

std::vector<SweepRow> curve_sweep(const std::vector<double>& mu, Setting setting,
                                  const std::vector<double>& thresholds);
/// smin, smin + step, ... up to smax (inclusive within 1e-9 step).
std::vector<double> threshold_grid(double smin, double smax, double step);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// The two reference problems, each under NonMonotonic and Increasing, with
/// DT, BC, Racing and APT at delta = 0.1 and the practical threshold.
std::vector<ExperimentConfig> table1_configs(std::uint64_t replications = 10000,
                                             std::uint64_t master_seed = 1);

/// A tenth of the gap between the two smallest distances to the threshold.
double apt_epsilon(const BanditInstance& instance);

}  // namespace tbandit
