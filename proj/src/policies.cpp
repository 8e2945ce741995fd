#include "tbandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tbandit {
namespace {

std::vector<double> as_weights(const RunState& state) {
  return std::vector<double>(state.counts.begin(), state.counts.end());
}

bool any_below(std::span<const double> means, double threshold) {
  return std::any_of(means.begin(), means.end(), [&](double m) { return m <= threshold; });
}

std::size_t smallest_mean(std::span<const double> means) {
  return static_cast<std::size_t>(std::min_element(means.begin(), means.end()) - means.begin());
}

Weights unit_vector(std::size_t arms, std::size_t a) {
  Weights w(arms, 0.0);
  w[a] = 1.0;
  return w;
}

}  // namespace

RunState::RunState(std::size_t arms) : counts(arms, 0), sums(arms, 0.0) {}

void RunState::record(std::size_t arm, double reward) {
  ++counts.at(arm);
  sums[arm] += reward;
  ++t;
}

std::vector<double> RunState::means() const {
  std::vector<double> out(counts.size(), 0.0);
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a] > 0) out[a] = sums[a] / static_cast<double>(counts[a]);
  return out;
}

bool RunState::all_pulled() const noexcept {
  return std::all_of(counts.begin(), counts.end(), [](std::uint64_t n) { return n > 0; });
}

std::string_view to_string(BetaKind kind) {
  return kind == BetaKind::Theoretical ? "Theoretical" : "Practical";
}

BetaKind parse_beta_kind(std::string_view name) {
  if (name == "Theoretical") return BetaKind::Theoretical;
  if (name == "Practical") return BetaKind::Practical;
  throw std::invalid_argument("unknown beta kind '" + std::string(name) +
                              "' (expected Theoretical or Practical)");
}

double exploration_floor(std::uint64_t t, std::size_t arms) {
  return std::max(std::sqrt(static_cast<double>(t)) - static_cast<double>(arms) / 2.0, 0.0);
}

std::vector<std::size_t> forced_exploration_set(const RunState& state) {
  const double h = exploration_floor(state.t, state.arms());
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < state.arms(); ++a)
    if (static_cast<double>(state.counts[a]) < h) out.push_back(a);
  return out;
}

std::size_t dt_sample(const RunState& state, std::span<const double> weights) {
  if (weights.size() != state.arms()) throw std::domain_error("weights and counts differ in length");
  const auto forced = forced_exploration_set(state);
  if (!forced.empty()) {
    std::size_t best = forced.front();
    for (std::size_t a : forced)
      if (state.counts[a] < state.counts[best]) best = a;
    return best;
  }
  const double t = static_cast<double>(state.t);
  std::size_t best = 0;
  double best_gap = -INFINITY;
  for (std::size_t a = 0; a < state.arms(); ++a) {
    const double gap = t * weights[a] - static_cast<double>(state.counts[a]);
    if (gap > best_gap) {
      best_gap = gap;
      best = a;
    }
  }
  return best;
}

double glr_statistic(const RunState& state, double threshold, Setting setting) {
  if (!state.all_pulled()) throw std::domain_error("every arm must be pulled before the GLR test");
  const auto means = state.means();
  if (setting == Setting::BelowThreshold && !any_below(means, threshold)) return 0.0;
  const auto w = as_weights(state);
  return evaluate_objective(Model{means, threshold, setting}, w).value;
}

double log_theoretical_constant(std::size_t arms) {
  const double k = static_cast<double>(arms);
  return (k + 1.0) + k * std::log(2.0 / k) + 3.0 * k * std::log(2.0 * (3.0 * k + 2.0)) +
         std::log(4.0 / std::log(3.0));
}

double beta_threshold(std::uint64_t t, const StoppingConfig& config, std::size_t arms) {
  if (t < 1) throw std::domain_error("beta needs t >= 1");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
  const double log_t = std::log(static_cast<double>(t));
  if (config.beta_kind == BetaKind::Practical) return std::log((log_t + 1.0) / config.delta);
  const double l = log_t + log_theoretical_constant(arms) - std::log(config.delta);
  if (!(l > 1.0)) throw std::domain_error("log(tC/delta) must exceed 1");
  return l + (3.0 * static_cast<double>(arms) + 2.0) * std::log(l);
}

bool should_stop(const RunState& state, double threshold, const StoppingConfig& config) {
  return glr_statistic(state, threshold, config.setting) >
         beta_threshold(state.t, config, state.arms());
}

std::size_t recommend(const RunState& state, double threshold, Setting setting) {
  const auto means = state.means();
  if (setting == Setting::BelowThreshold && !any_below(means, threshold))
    return smallest_mean(means);
  return optimal_arm(Model{means, threshold, setting}).index;
}

double restricted_cost(const RunState& state, double threshold, Setting setting, std::size_t b) {
  const auto means = state.means();
  const auto w = as_weights(state);
  const Model model{means, threshold, setting};
  switch (setting) {
    case Setting::Increasing:
      return project_alternative_increasing(model, w, b).cost;
    case Setting::BelowThreshold:
      return project_alternative_below(model, w, b).cost;
    case Setting::NonMonotonic:
      break;
  }
  return project_alternative_nonmonotonic(model, w, b).cost;
}

std::size_t bc_sample(const RunState& state, double threshold, Setting setting) {
  const auto forced = forced_exploration_set(state);
  if (!forced.empty()) {
    std::size_t best = forced.front();
    for (std::size_t a : forced)
      if (state.counts[a] < state.counts[best]) best = a;
    return best;
  }
  const auto means = state.means();
  if (setting == Setting::BelowThreshold && !any_below(means, threshold))
    return smallest_mean(means);
  const Model model{means, threshold, setting};
  const auto leaders = optimal_arm_set(model);
  const std::size_t leader = leaders.front();
  std::size_t challenger = leader;
  if (leaders.size() > 1) {
    challenger = leaders[1];
  } else {
    const auto w = as_weights(state);
    const auto objective = evaluate_objective(model, w);
    if (!objective.best_arms.empty() && objective.best_arms.front() < state.arms())
      challenger = objective.best_arms.front();
  }
  return state.counts[challenger] < state.counts[leader] ? challenger : leader;
}

std::vector<std::size_t> racing_eliminations(const RunState& state, double threshold,
                                             Setting setting, double beta) {
  std::vector<std::size_t> out;
  std::size_t keep = state.active.empty() ? 0 : state.active.front();
  double keep_cost = INFINITY;
  for (std::size_t b : state.active) {
    const double cost = restricted_cost(state, threshold, setting, b);
    if (cost > beta) out.push_back(b);
    if (cost < keep_cost) {
      keep_cost = cost;
      keep = b;
    }
  }
  // The cheapest arm always survives.
  if (out.size() == state.active.size()) std::erase(out, keep);
  return out;
}

std::size_t apt_sample(const RunState& state, double threshold, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::domain_error("APT epsilon must be nonnegative");
  const auto means = state.means();
  std::size_t best = 0;
  double best_index = INFINITY;
  for (std::size_t a = 0; a < state.arms(); ++a) {
    const double index = std::sqrt(static_cast<double>(state.counts[a])) *
                         (std::abs(means[a] - threshold) + epsilon);
    if (index < best_index) {
      best_index = index;
      best = a;
    }
  }
  return best;
}

WeightTracker::WeightTracker(double threshold, Setting setting)
    : WeightTracker(threshold, setting, Options{}) {}

WeightTracker::WeightTracker(double threshold, Setting setting, Options options)
    : threshold_(threshold), setting_(setting), options_(options) {}

const Weights& WeightTracker::update(std::span<const double> means) {
  const std::size_t k = means.size();
  const Model model{means, threshold_, setting_};

  if (setting_ == Setting::BelowThreshold) {
    if (!any_below(means, threshold_)) {
      weights_ = unit_vector(k, smallest_mean(means));
      return weights_;
    }
    const auto argmin = optimal_arm_set(model);
    if (argmin.size() > 1)
      weights_ = uniform_over(k, argmin);
    else if (argmin.front() + 1 == k)
      weights_ = unit_vector(k, argmin.front());
    else
      weights_ = below_threshold_closed_form(model).weights;
    return weights_;
  }

  const auto argmin = optimal_arm_set(model);
  if (argmin.size() > 1) {
    weights_ = uniform_over(k, argmin);
    warm_ = false;
    return weights_;
  }
  // A new empirical leader moves the optimum far away: solve from scratch.
  if (!warm_ || weights_.size() != k || leader_ != argmin.front()) {
    SolverOptions opts;
    opts.max_iterations = options_.cold_iterations;
    opts.step_scale = options_.cold_step_scale;
    weights_ = solve_complexity(model, opts).weights;
    leader_ = argmin.front();
    warm_ = true;
    return weights_;
  }
  SolverOptions opts;
  opts.initial = weights_;
  opts.max_iterations = options_.warm_iterations;
  opts.window = options_.warm_iterations;
  opts.step_scale = options_.warm_step_scale;
  weights_ = solve_complexity(model, opts).weights;
  return weights_;
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::DT:
      return "DT";
    case Algorithm::BC:
      return "BC";
    case Algorithm::Racing:
      return "Racing";
    case Algorithm::APT:
      return "APT";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "DT") return Algorithm::DT;
  if (name == "BC") return Algorithm::BC;
  if (name == "Racing") return Algorithm::Racing;
  if (name == "APT") return Algorithm::APT;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected DT, BC, Racing or APT)");
}

RunOutcome run_policy(const GaussianEnv& env, std::uint64_t replication, Algorithm algorithm,
                      const PolicyParams& params, const StoppingConfig& config,
                      const RunOptions& options) {
  const BanditInstance& instance = env.instance();
  const std::size_t k = instance.arms();
  const double s = instance.threshold();
  if (params.recompute_every == 0) throw std::domain_error("recompute_every must be positive");
  if (algorithm == Algorithm::APT && !(params.epsilon >= 0.0))
    throw std::domain_error("APT epsilon must be nonnegative");

  RunOutcome out{0, 0, false, RunState(k)};
  RunState& st = out.state;
  auto pull = [&](std::size_t arm) { st.record(arm, env.draw(replication, st.t, arm)); };

  for (std::size_t a = 0; a < k; ++a) pull(a);

  if (algorithm == Algorithm::Racing) {
    for (std::size_t a = 0; a < k; ++a) st.active.push_back(a);
    for (;;) {
      if (options.stopping) {
        const double beta = beta_threshold(st.t, config, k);
        for (std::size_t b : racing_eliminations(st, s, config.setting, beta))
          std::erase(st.active, b);
        if (st.active.size() == 1) {
          out.stopped = true;
          out.recommended = st.active.front();
          break;
        }
      }
      if (st.t + st.active.size() > options.max_steps) {
        out.recommended = recommend(st, s, config.setting);
        break;
      }
      for (std::size_t a : st.active) pull(a);
    }
    out.tau = st.t;
    return out;
  }

  WeightTracker tracker(s, config.setting, params.tracking);
  for (;;) {
    if (options.stopping && should_stop(st, s, config)) {
      out.stopped = true;
      break;
    }
    if (st.t >= options.max_steps) break;
    std::size_t arm = 0;
    switch (algorithm) {
      case Algorithm::DT: {
        if (tracker.weights().empty() || st.t % params.recompute_every == 0)
          tracker.update(st.means());
        arm = dt_sample(st, tracker.weights());
        break;
      }
      case Algorithm::BC:
        arm = bc_sample(st, s, config.setting);
        break;
      case Algorithm::APT:
        arm = apt_sample(st, s, params.epsilon);
        break;
      case Algorithm::Racing:
        break;
    }
    pull(arm);
  }
  out.recommended = recommend(st, s, config.setting);
  out.tau = st.t;
  return out;
}

}  // namespace tbandit
