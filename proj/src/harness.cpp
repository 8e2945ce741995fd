#include "tbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace tbandit {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : object.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

const json& require(const json& object, const std::string& key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw ConfigError("missing key '" + key + "' in " + where);
  return *it;
}

double as_number(const json& value, const std::string& what) {
  if (!value.is_number()) throw ConfigError(what + " must be a number");
  return value.get<double>();
}

std::uint64_t as_count(const json& value, const std::string& what) {
  if (!value.is_number_unsigned()) throw ConfigError(what + " must be a nonnegative integer");
  return value.get<std::uint64_t>();
}

std::string as_string(const json& value, const std::string& what) {
  if (!value.is_string()) throw ConfigError(what + " must be a string");
  return value.get<std::string>();
}

BanditInstance parse_instance(const json& node) {
  reject_unknown_keys(node, {"mu", "threshold", "setting"}, "instance");
  const json& mu_node = require(node, "mu", "instance");
  if (!mu_node.is_array()) throw ConfigError("instance.mu must be an array of numbers");
  std::vector<double> mu;
  for (const json& m : mu_node) mu.push_back(as_number(m, "instance.mu entry"));
  const double threshold = as_number(require(node, "threshold", "instance"), "instance.threshold");
  try {
    const Setting setting =
        parse_setting(as_string(require(node, "setting", "instance"), "instance.setting"));
    return BanditInstance(std::move(mu), threshold, setting);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
}

AlgorithmSpec parse_algorithm_spec(const json& node) {
  reject_unknown_keys(node, {"name", "epsilon", "recompute_every"}, "algorithm entry");
  AlgorithmSpec spec;
  try {
    spec.algorithm = parse_algorithm(as_string(require(node, "name", "algorithm entry"), "name"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (node.contains("epsilon")) {
    if (spec.algorithm != Algorithm::APT) throw ConfigError("epsilon only applies to APT");
    spec.params.epsilon = as_number(node["epsilon"], "epsilon");
    if (!(spec.params.epsilon >= 0.0) || !std::isfinite(spec.params.epsilon))
      throw ConfigError("epsilon must be a finite nonnegative number");
  }
  if (node.contains("recompute_every")) {
    if (spec.algorithm != Algorithm::DT) throw ConfigError("recompute_every only applies to DT");
    spec.params.recompute_every = as_count(node["recompute_every"], "recompute_every");
    if (spec.params.recompute_every == 0) throw ConfigError("recompute_every must be positive");
  }
  return spec;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool is_correct(const BanditInstance& instance, std::size_t recommended) {
  const auto best = optimal_arm_set(instance.model());
  return std::find(best.begin(), best.end(), recommended) != best.end();
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown_keys(root,
                      {"instance", "algorithms", "delta", "beta_kind", "replications",
                       "master_seed", "parallelism", "problem_id"},
                      "config");
  ExperimentConfig config{parse_instance(require(root, "instance", "config")), {}, 0.1, BetaKind::Practical, 1, 0, 0, ""};

  const json& algos = require(root, "algorithms", "config");
  if (!algos.is_array() || algos.empty())
    throw ConfigError("algorithms must be a non-empty array");
  for (const json& a : algos) config.algorithms.push_back(parse_algorithm_spec(a));

  config.delta = as_number(require(root, "delta", "config"), "delta");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (root.contains("beta_kind")) {
    try {
      config.beta_kind = parse_beta_kind(as_string(root["beta_kind"], "beta_kind"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  config.replications = as_count(require(root, "replications", "config"), "replications");
  if (config.replications < 1) throw ConfigError("replications must be at least 1");
  config.master_seed = as_count(require(root, "master_seed", "config"), "master_seed");
  if (root.contains("parallelism")) {
    config.parallelism = as_count(root["parallelism"], "parallelism");
    if (config.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  }
  if (root.contains("problem_id")) config.problem_id = as_string(root["problem_id"], "problem_id");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::size_t default_parallelism() {
  if (const char* env = std::getenv("TBANDIT_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t parallelism) {
  if (config.algorithms.empty()) throw ConfigError("no algorithm to run");
  if (config.replications < 1) throw ConfigError("replications must be at least 1");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (parallelism == 0) parallelism = config.parallelism;
  if (parallelism == 0) parallelism = default_parallelism();

  const GaussianEnv env(config.instance, config.master_seed);
  const StoppingConfig stopping{config.delta, config.beta_kind, config.instance.setting()};
  const std::uint64_t reps = config.replications;
  const std::uint64_t jobs = reps * config.algorithms.size();

  ExperimentResult result;
  result.trials.resize(jobs);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const AlgorithmSpec& spec = config.algorithms[job / reps];
      const std::uint64_t rep = job % reps;
      try {
        const RunOutcome outcome = run_policy(env, rep, spec.algorithm, spec.params, stopping);
        result.trials[job] = TrialRecord{spec.algorithm,
                                         rep,
                                         outcome.tau,
                                         outcome.recommended,
                                         is_correct(config.instance, outcome.recommended),
                                         outcome.stopped,
                                         replication_seed(config.master_seed, rep)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };

  const std::size_t threads = std::min<std::uint64_t>(parallelism, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
    const auto first = result.trials.begin() + static_cast<std::ptrdiff_t>(i * reps);
    const std::vector<TrialRecord> slice(first, first + static_cast<std::ptrdiff_t>(reps));
    result.summaries.push_back(summarize(config, config.algorithms[i].algorithm, slice));
  }
  return result;
}

Summary summarize(const ExperimentConfig& config, Algorithm algorithm,
                  const std::vector<TrialRecord>& trials) {
  Summary s;
  s.algorithm = algorithm;
  s.setting = config.instance.setting();
  s.problem_id = config.problem_id;
  s.delta = config.delta;
  s.master_seed = config.master_seed;
  double sum = 0.0;
  std::uint64_t errors = 0;
  for (const TrialRecord& r : trials) {
    if (r.algorithm != algorithm) continue;
    ++s.replications;
    sum += static_cast<double>(r.tau);
    if (!r.correct) ++errors;
  }
  if (s.replications == 0) return s;
  const double n = static_cast<double>(s.replications);
  s.mean_tau = sum / n;
  double ss = 0.0;
  for (const TrialRecord& r : trials) {
    if (r.algorithm != algorithm) continue;
    const double d = static_cast<double>(r.tau) - s.mean_tau;
    ss += d * d;
  }
  s.stderr_tau = s.replications > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  s.error_rate = static_cast<double>(errors) / n;
  return s;
}

std::string summary_csv_rows(const std::vector<Summary>& summaries) {
  std::string out;
  for (const Summary& s : summaries) {
    out += std::string(to_string(s.algorithm)) + ',' + std::string(to_string(s.setting)) + ',' +
           csv_field(s.problem_id) + ',' + format_double(s.delta) + ',' +
           std::to_string(s.replications) + ',' + format_double(s.mean_tau) + ',' +
           format_double(s.stderr_tau) + ',' + format_double(s.error_rate) + ',' +
           std::to_string(s.master_seed) + '\n';
  }
  return out;
}

std::string summary_csv(const std::vector<Summary>& summaries) {
  return std::string(kSummaryHeader) + '\n' + summary_csv_rows(summaries);
}

std::string raw_csv_rows(const ExperimentConfig& config, const std::vector<TrialRecord>& trials) {
  std::string out;
  const std::string setting(to_string(config.instance.setting()));
  const std::string problem = csv_field(config.problem_id);
  for (const TrialRecord& r : trials) {
    out += std::string(to_string(r.algorithm)) + ',' + setting + ',' + problem + ',' +
           std::to_string(r.replication) + ',' + std::to_string(r.tau) + ',' +
           std::to_string(r.recommended + 1) + ',' + (r.correct ? "1" : "0") + ',' +
           (r.stopped ? "1" : "0") + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string raw_csv(const ExperimentConfig& config, const std::vector<TrialRecord>& trials) {
  return std::string(kRawHeader) + '\n' + raw_csv_rows(config, trials);
}

json complexity_report(const BanditInstance& instance, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::domain_error("delta must lie in (0, 1/2]");
  const ComplexitySolution sol = solve_complexity(instance);
  const auto best = optimal_arm_set(instance.model());
  const double log_inv_delta = std::log(1.0 / delta);

  json report;
  report["setting"] = std::string(to_string(instance.setting()));
  report["mu"] = instance.mu();
  report["threshold"] = instance.threshold();
  report["delta"] = delta;
  std::vector<std::size_t> optimal;
  for (std::size_t a : best) optimal.push_back(a + 1);
  report["optimal_arms"] = optimal;
  report["t_star"] = finite_or_null(sol.t_star);
  report["inverse_t_star"] = sol.f_value;
  report["t_star_log_inv_delta"] = finite_or_null(sol.t_star * log_inv_delta);
  report["lower_bound_samples"] = finite_or_null(sol.t_star * kl_bernoulli(delta, 1.0 - delta));
  report["weights"] = sol.weights;
  report["iterations"] = sol.iterations;
  report["converged"] = sol.converged;
  report["gap_certificate"] = sol.gap_certificate;

  report["three_point_t_star"] = nullptr;
  report["bounds"] = nullptr;
  if (instance.setting() == Setting::Increasing && best.size() == 1) {
    report["three_point_t_star"] =
        finite_or_null(three_point_characteristic_time(instance).t_star);
    const std::size_t a = best.front();
    if (a > 0 && a + 1 < instance.arms()) {
      const TimeBounds b = characteristic_time_bounds(instance);
      report["bounds"] = {{"lower", b.lower}, {"upper", b.upper}};
    }
  }
  return report;
}

std::vector<double> threshold_grid(double smin, double smax, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::domain_error("step must be positive");
  if (!(smax >= smin)) throw std::domain_error("smax must be >= smin");
  const auto n = static_cast<std::size_t>(std::floor((smax - smin) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = smin + static_cast<double>(i) * step;
  return grid;
}

std::vector<SweepRow> curve_sweep(const std::vector<double>& mu, Setting setting,
                                  const std::vector<double>& thresholds) {
  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  for (double s : thresholds) {
    const BanditInstance instance(mu, s, setting);
    const ComplexitySolution sol = solve_complexity(instance);
    rows.push_back({s, sol.f_value, sol.weights});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "threshold,inverse_time";
  const std::size_t k = rows.empty() ? 0 : rows.front().weights.size();
  for (std::size_t a = 0; a < k; ++a) out += ",w" + std::to_string(a + 1);
  out += '\n';
  for (const SweepRow& r : rows) {
    out += format_double(r.threshold) + ',' + format_double(r.inverse_time);
    for (double w : r.weights) out += ',' + format_double(w);
    out += '\n';
  }
  return out;
}

double apt_epsilon(const BanditInstance& instance) {
  std::vector<double> d;
  for (double m : instance.mu()) d.push_back(std::abs(m - instance.threshold()));
  std::sort(d.begin(), d.end());
  return 0.1 * (d[1] - d[0]);
}

std::vector<ExperimentConfig> table1_configs(std::uint64_t replications,
                                             std::uint64_t master_seed) {
  struct Problem {
    const char* id;
    std::vector<double> mu;
    double threshold;
  };
  const Problem problems[] = {{"1", {0.5, 1.1, 1.2, 1.3, 1.4, 5.0}, 1.0},
                              {"2", {1.0, 2.0, 2.5}, 1.55}};
  std::vector<ExperimentConfig> out;
  for (const Problem& p : problems) {
    for (Setting setting : {Setting::NonMonotonic, Setting::Increasing}) {
      ExperimentConfig c{BanditInstance(p.mu, p.threshold, setting), {}, 0.1, BetaKind::Practical, 1, 0, 0, ""};
      for (Algorithm a : {Algorithm::DT, Algorithm::BC, Algorithm::Racing, Algorithm::APT}) {
        AlgorithmSpec spec{a, {}};
        if (a == Algorithm::APT) spec.params.epsilon = apt_epsilon(c.instance);
        c.algorithms.push_back(spec);
      }
      c.delta = 0.1;
      c.beta_kind = BetaKind::Practical;
      c.replications = replications;
      c.master_seed = master_seed;
      c.problem_id = p.id;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace tbandit
