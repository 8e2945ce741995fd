#include "tbandit/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tbandit {

std::string_view to_string(Setting setting) {
  switch (setting) {
    case Setting::NonMonotonic:
      return "NonMonotonic";
    case Setting::Increasing:
      return "Increasing";
    case Setting::BelowThreshold:
      return "BelowThreshold";
  }
  return "?";
}

Setting parse_setting(std::string_view name) {
  if (name == "NonMonotonic") return Setting::NonMonotonic;
  if (name == "Increasing") return Setting::Increasing;
  if (name == "BelowThreshold") return Setting::BelowThreshold;
  throw std::invalid_argument("unknown setting '" + std::string(name) +
                              "' (expected NonMonotonic, Increasing or BelowThreshold)");
}

BanditInstance::BanditInstance(std::vector<double> mu, double threshold, Setting setting)
    : mu_(std::move(mu)), threshold_(threshold), setting_(setting) {
  if (mu_.size() < 2) throw std::invalid_argument("a bandit instance needs at least two arms");
  for (double m : mu_)
    if (!std::isfinite(m)) throw std::invalid_argument("arm means must be finite");
  if (!std::isfinite(threshold_)) throw std::invalid_argument("threshold must be finite");
  if (setting_ != Setting::NonMonotonic) {
    for (std::size_t a = 1; a < mu_.size(); ++a)
      if (!(mu_[a - 1] < mu_[a]))
        throw std::invalid_argument("means must be strictly increasing for setting " +
                                    std::string(to_string(setting_)));
  }
  if (setting_ == Setting::BelowThreshold && !(mu_.front() <= threshold_))
    throw std::invalid_argument("BelowThreshold needs at least one mean <= threshold");
}

std::vector<std::size_t> optimal_arm_set(const Model& model) {
  const bool below = model.setting == Setting::BelowThreshold;
  double best = INFINITY;
  std::vector<std::size_t> arms;
  for (std::size_t a = 0; a < model.arms(); ++a) {
    if (below && model.mu[a] > model.threshold) continue;
    const double d = std::abs(model.mu[a] - model.threshold);
    if (d < best) {
      best = d;
      arms.assign(1, a);
    } else if (d == best) {
      arms.push_back(a);
    }
  }
  return arms;
}

OptimalArm optimal_arm(const Model& model) {
  const bool below = model.setting == Setting::BelowThreshold;
  OptimalArm out;
  double best = INFINITY;
  for (std::size_t a = 0; a < model.arms(); ++a) {
    if (below && model.mu[a] > model.threshold) continue;
    const double d = std::abs(model.mu[a] - model.threshold);
    if (d < best) {
      best = d;
      out = OptimalArm{a, 1};
    } else if (d == best) {
      ++out.tie_count;
    }
  }
  if (out.tie_count == 0) throw std::domain_error("no arm has mean <= threshold");
  return out;
}

bool on_simplex(std::span<const double> w, double tol) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= tol;
}

Weights uniform_weights(std::size_t arms) {
  return Weights(arms, 1.0 / static_cast<double>(arms));
}

Weights uniform_over(std::size_t arms, std::span<const std::size_t> support) {
  Weights w(arms, 0.0);
  for (std::size_t a : support) w.at(a) = 1.0 / static_cast<double>(support.size());
  return w;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Uniform in (0, 1]; never zero so log() is safe.
double unit_open_closed(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}
}  // namespace

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication) noexcept {
  return mix64(mix64(master_seed + kGolden) ^ (replication * kGolden + 0x632be59bd9b4e019ULL));
}

double standard_normal(std::uint64_t stream_key, std::uint64_t step) noexcept {
  // Position n of a splitmix64 stream is mix64(key + (n + 1) * golden); each
  // step consumes two positions (Box-Muller, cosine branch).
  const double u1 = unit_open_closed(mix64(stream_key + (2 * step + 1) * kGolden));
  const double u2 = unit_open_closed(mix64(stream_key + (2 * step + 2) * kGolden));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double GaussianEnv::draw(std::uint64_t replication, std::uint64_t step, std::size_t arm) const {
  if (arm >= instance_.arms()) throw std::out_of_range("arm index out of range");
  return instance_.mu()[arm] +
         standard_normal(replication_seed(master_seed_, replication), step);
}

}  // namespace tbandit
