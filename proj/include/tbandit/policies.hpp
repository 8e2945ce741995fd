#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tbandit/complexity.hpp"
#include "tbandit/core.hpp"

// Sequential identification: sampling rules, the GLR stopping rule and the
// decision rule. Every routine works on the empirical state of one run.
namespace tbandit {

struct RunState {
  std::vector<std::uint64_t> counts;
  std::vector<double> sums;
  std::uint64_t t = 0;
  std::vector<std::size_t> active;  // used by Racing only

  explicit RunState(std::size_t arms);

  std::size_t arms() const noexcept { return counts.size(); }
  void record(std::size_t arm, double reward);
  /// Empirical means; arms never pulled report 0.
  std::vector<double> means() const;
  bool all_pulled() const noexcept;
};

enum class BetaKind { Theoretical, Practical };

std::string_view to_string(BetaKind kind);
/// "Theoretical" or "Practical"; std::invalid_argument otherwise.
BetaKind parse_beta_kind(std::string_view name);

struct StoppingConfig {
  double delta = 0.1;
  BetaKind beta_kind = BetaKind::Practical;
  Setting setting = Setting::Increasing;
};

/// h(t) = (sqrt(t) - K/2)_+
double exploration_floor(std::uint64_t t, std::size_t arms);

/// Arms with N_a(t) < h(t).
std::vector<std::size_t> forced_exploration_set(const RunState& state);

/// Least pulled arm of the forced-exploration set if it is non-empty,
/// otherwise argmax_a t w_a - N_a(t). Smallest index on ties.
std::size_t dt_sample(const RunState& state, std::span<const double> weights);

/// inf over the alternative set of sum_a N_a (mu_hat_a - lambda_a)^2 / 2.
/// Zero when the empirical optimal arm is tied or (BelowThreshold) when no
/// empirical mean is <= S. Throws std::domain_error if an arm was never
/// pulled.
double glr_statistic(const RunState& state, double threshold, Setting setting);

/// log C with C = e^{K+1} (2/K)^K (2(3K+2))^{3K} 4 / log 3.
double log_theoretical_constant(std::size_t arms);

/// Theoretical: log(tC/delta) + (3K+2) log log(tC/delta).
/// Practical:   log((log t + 1) / delta).
/// Throws std::domain_error for t < 1 or delta outside (0, 1).
double beta_threshold(std::uint64_t t, const StoppingConfig& config, std::size_t arms);

bool should_stop(const RunState& state, double threshold, const StoppingConfig& config);

/// Empirical closest arm, smallest index on ties. BelowThreshold restricts to
/// means <= S and falls back to the smallest mean when there is none.
std::size_t recommend(const RunState& state, double threshold, Setting setting);

/// Cost of the closest model (under the setting's structure) whose optimal
/// arm is b, with the run's counts as weights. For BelowThreshold b = K
/// means "no arm below the threshold".
double restricted_cost(const RunState& state, double threshold, Setting setting, std::size_t b);

/// Forced exploration as in dt_sample; otherwise the less pulled of the
/// empirical best arm and its cheapest challenger (best arm on ties).
std::size_t bc_sample(const RunState& state, double threshold, Setting setting);

/// Active arms whose restricted cost exceeds `beta`.
std::vector<std::size_t> racing_eliminations(const RunState& state, double threshold,
                                             Setting setting, double beta);

/// argmin_a sqrt(N_a) (|mu_hat_a - S| + epsilon), smallest index on ties.
/// Throws std::domain_error for negative epsilon.
std::size_t apt_sample(const RunState& state, double threshold, double epsilon);

/// Optimal weights at the empirical model for Direct-Tracking. Warm-starts
/// the ascent from the previous answer once a full solve has been done.
class WeightTracker {
 public:
  struct Options {
    std::size_t warm_iterations = 10;
    double warm_step_scale = 0.02;
    /// Iteration cap of the full solve done when the empirical leader changes.
    std::size_t cold_iterations = 300;
    double cold_step_scale = 0.1;
  };

  WeightTracker(double threshold, Setting setting);
  WeightTracker(double threshold, Setting setting, Options options);

  const Weights& update(std::span<const double> means);
  const Weights& weights() const noexcept { return weights_; }

 private:
  double threshold_;
  Setting setting_;
  Options options_;
  Weights weights_;
  std::size_t leader_ = 0;
  bool warm_ = false;
};

enum class Algorithm { DT, BC, Racing, APT };

std::string_view to_string(Algorithm algorithm);
/// "DT", "BC", "Racing" or "APT"; std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);

struct PolicyParams {
  double epsilon = 0.0;             // APT
  std::size_t recompute_every = 1;  // DT weight refresh period
  WeightTracker::Options tracking;
};

struct RunOptions {
  bool stopping = true;
  /// Hard cap on the number of pulls; a run reaching it is reported as not
  /// stopped.
  std::uint64_t max_steps = 50'000'000;
};

struct RunOutcome {
  std::uint64_t tau = 0;
  std::size_t recommended = 0;
  bool stopped = false;
  RunState state;
};

/// One identification run on replication `replication` of `env`.
RunOutcome run_policy(const GaussianEnv& env, std::uint64_t replication, Algorithm algorithm,
                      const PolicyParams& params, const StoppingConfig& config,
                      const RunOptions& options = {});

}  // namespace tbandit
