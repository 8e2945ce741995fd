#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Arm indices are 0-based throughout the library. Human-facing output (CLI,
// CSV, JSON) reports them 1-based.
namespace tbandit {

enum class Setting { NonMonotonic, Increasing, BelowThreshold };

std::string_view to_string(Setting setting);

/// Parses "NonMonotonic", "Increasing" or "BelowThreshold".
/// Throws std::invalid_argument on anything else.
Setting parse_setting(std::string_view name);

/// Unvalidated view of a Gaussian model: arm means, threshold and structural
/// setting. Empirical means are handled through this view because they need
/// not satisfy the structural invariants of the true model.
struct Model {
  std::span<const double> mu;
  double threshold = 0.0;
  Setting setting = Setting::NonMonotonic;

  std::size_t arms() const noexcept { return mu.size(); }
};

/// A validated thresholding bandit problem with unit-variance Gaussian arms.
///
/// Invariants: at least two arms; strictly increasing means for the
/// Increasing and BelowThreshold settings; at least one mean not above the
/// threshold for BelowThreshold. The constructor throws std::invalid_argument
/// when any of them fails.
class BanditInstance {
 public:
  BanditInstance(std::vector<double> mu, double threshold, Setting setting);

  const std::vector<double>& mu() const noexcept { return mu_; }
  double threshold() const noexcept { return threshold_; }
  Setting setting() const noexcept { return setting_; }
  std::size_t arms() const noexcept { return mu_.size(); }

  Model model() const noexcept { return Model{mu_, threshold_, setting_}; }

  /// Same means and threshold under another structural setting.
  BanditInstance with_setting(Setting setting) const {
    return BanditInstance(mu_, threshold_, setting);
  }

 private:
  std::vector<double> mu_;
  double threshold_;
  Setting setting_;
};

struct OptimalArm {
  std::size_t index = 0;       // smallest minimizer
  std::size_t tie_count = 0;   // size of the argmin set

  bool unique() const noexcept { return tie_count == 1; }
};

/// Arm whose mean is closest to the threshold. For BelowThreshold only arms
/// with mean <= threshold compete; throws std::domain_error if there is none.
OptimalArm optimal_arm(const Model& model);
inline OptimalArm optimal_arm(const BanditInstance& instance) {
  return optimal_arm(instance.model());
}

/// All indices attaining the minimum of |mu_a - S| (restricted as above).
std::vector<std::size_t> optimal_arm_set(const Model& model);

// Weights on the probability simplex are plain vectors; the helpers below
// check and build them.
using Weights = std::vector<double>;

bool on_simplex(std::span<const double> w, double tol = 1e-12);
Weights uniform_weights(std::size_t arms);
/// Uniform mass over `support`, zero elsewhere.
Weights uniform_over(std::size_t arms, std::span<const std::size_t> support);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Per-replication stream key derived from the master seed.
std::uint64_t replication_seed(std::uint64_t master_seed,
                               std::uint64_t replication) noexcept;

/// Standard normal variate at position `step` of the stream `stream_key`.
/// Random access: the value depends only on (stream_key, step).
double standard_normal(std::uint64_t stream_key, std::uint64_t step) noexcept;

/// Unit-variance Gaussian reward environment. A reward is a pure function of
/// (master_seed, replication, step, arm); every algorithm replaying the same
/// replication sees the same noise sequence.
class GaussianEnv {
 public:
  GaussianEnv(BanditInstance instance, std::uint64_t master_seed)
      : instance_(std::move(instance)), master_seed_(master_seed) {}

  const BanditInstance& instance() const noexcept { return instance_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }

  /// Throws std::out_of_range if `arm` is not a valid index.
  double draw(std::uint64_t replication, std::uint64_t step,
              std::size_t arm) const;

 private:
  BanditInstance instance_;
  std::uint64_t master_seed_;
};

}  // namespace tbandit
