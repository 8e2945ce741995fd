#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "tbandit/core.hpp"

// Characteristic times and optimal sampling weights of Gaussian thresholding
// bandits.
//
// For weights w on the simplex the transportation objective is
//   F(w) = inf_{lambda in Alt(mu)} sum_a w_a (mu_a - lambda_a)^2 / 2,
// the characteristic time is T* = 1 / max_w F(w) and w* is the maximizer.
// F is positively homogeneous, so the same routines evaluate the GLR
// statistic when fed raw pull counts instead of proportions.
namespace tbandit {

/// Floor applied to weights inside the weighted regressions so that
/// zero-weight arms keep the projection well posed.
inline constexpr double kWeightFloor = 1e-12;

/// Tolerance used to collect every challenger attaining the minimum.
inline constexpr double kBestArmTolerance = 1e-9;

/// Closest alternative model whose optimal arm is `target_arm`, with its
/// weighted quadratic cost. For the BelowThreshold setting target_arm equal
/// to the number of arms denotes "no arm below the threshold".
struct Projection {
  std::vector<double> lambda;
  double cost = 0.0;
  std::size_t target_arm = 0;
};

struct ObjectiveValue {
  double value = 0.0;
  std::vector<std::size_t> best_arms;  // challengers attaining the minimum
  std::vector<double> subgradient;     // supergradient of the concave F
};

struct ComplexitySolution {
  Weights weights;
  double t_star = 0.0;        // +inf when the optimal arm is not unique
  double f_value = 0.0;       // 1 / t_star
  std::size_t iterations = 0;
  double gap_certificate = 0.0;  // upper bound on max F - f_value
  bool converged = true;
};

struct SolverOptions {
  std::size_t max_iterations = 20000;
  /// Stop once the best value improved by less than `tolerance` (relative)
  /// over this many iterations.
  std::size_t window = 5000;
  double tolerance = 1e-12;
  /// Step k moves the weights by step_scale / sqrt(k) in the Euclidean norm
  /// (before projection).
  double step_scale = 0.03;
  /// Starting point; uniform when empty.
  Weights initial;
};

/// Euclidean projection onto the probability simplex, in place.
void project_to_simplex(std::span<double> w);

// --- alternatives ---------------------------------------------------------

/// Minimum over challengers b of  w_a* w_b / (2 (w_a* + w_b)) *
/// min((mu_a* - mu_b)^2, (2S - mu_a* - mu_b)^2). Returns {0, a*} when the
/// optimal arm is tied.
struct ChallengerCost {
  double value = 0.0;
  std::size_t arm = 0;
};
ChallengerCost alt_cost_nonmonotonic(const Model& model, std::span<const double> w);

/// Projection onto the closure of increasing models whose closest arm is b.
Projection project_alternative_increasing(const Model& model, std::span<const double> w,
                                          std::size_t b);

/// Projection onto the closure of models (no structure) whose closest arm is
/// b: arm b moves toward S and every arm closer than it is pushed out.
Projection project_alternative_nonmonotonic(const Model& model, std::span<const double> w,
                                            std::size_t b);

/// Projection onto the closure of increasing models whose closest arm below
/// S is b (b = K: every mean at or above S).
Projection project_alternative_below(const Model& model, std::span<const double> w,
                                     std::size_t b);

/// Setting-dispatched projection onto "b is optimal".
Projection project_alternative(const Model& model, std::span<const double> w, std::size_t b);

// --- objectives -----------------------------------------------------------

ObjectiveValue F_increasing(const Model& model, std::span<const double> w);
ObjectiveValue F_nonmonotonic(const Model& model, std::span<const double> w);
/// BelowThreshold objective. Throws std::domain_error if no mean is <= S.
ObjectiveValue F_below(const Model& model, std::span<const double> w);
ObjectiveValue evaluate_objective(const Model& model, std::span<const double> w);

// --- solvers and closed forms --------------------------------------------

/// Maximizes F over the simplex by projected subgradient ascent
/// with normalized steps step_scale / sqrt(k). BelowThreshold returns the closed form.
ComplexitySolution solve_complexity(const Model& model, const SolverOptions& options = {});
inline ComplexitySolution solve_complexity(const BanditInstance& instance,
                                           const SolverOptions& options = {}) {
  return solve_complexity(instance.model(), options);
}

struct TwoArmInverseTimes {
  double increasing = 0.0;
  double nonmonotonic = 0.0;
};
/// K = 2 closed forms of 1/T*. Both are zero when 2S = mu_1 + mu_2.
TwoArmInverseTimes two_arm_closed_form(const BanditInstance& instance);

/// Cost of the "+" alternative: arm a* at theta <= S and arm a*+1 at 2S - theta.
/// w3 = (w_{a*-1}, w_{a*}, w_{a*+1}). +inf when a* is the last arm.
double d_plus(const Model& model, std::size_t optimal, double theta,
              const std::array<double, 3>& w3);
/// Cost of the "-" alternative: arm a* at theta >= S and arm a*-1 at 2S - theta.
/// +inf when a* is the first arm.
double d_minus(const Model& model, std::size_t optimal, double theta,
               const std::array<double, 3>& w3);

struct ThreePointSolution {
  double t_star = 0.0;
  double f_value = 0.0;
  std::array<double, 3> weights{};  // on (a*-1, a*, a*+1)
};
/// Characteristic time of an increasing instance through the reduction to
/// the optimal arm and its two neighbours: a nested sup over the 3-simplex
/// of the minimum over theta of D+ and D-. Independent of solve_complexity.
ThreePointSolution three_point_characteristic_time(const BanditInstance& instance);

struct TimeBounds {
  double lower = 0.0;
  double upper = 0.0;
};
/// (1 / Delta_0^2, sum_k 1 / Delta_k^2) for increasing instances with an
/// interior optimal arm; std::domain_error otherwise.
TimeBounds characteristic_time_bounds(const BanditInstance& instance);

/// Exact BelowThreshold solution: weights on {a*, a*+1}. Throws
/// std::domain_error when a* is the last arm or no mean is <= S.
ComplexitySolution below_threshold_closed_form(const Model& model);
inline ComplexitySolution below_threshold_closed_form(const BanditInstance& instance) {
  return below_threshold_closed_form(instance.model());
}

/// Bernoulli divergence kl(p, q).
double kl_bernoulli(double p, double q);

/// T* kl(delta, 1 - delta). Throws std::domain_error unless 0 < delta <= 1/2.
double lower_bound_samples(double t_star, double delta);
double lower_bound_samples(const BanditInstance& instance, double delta);

}  // namespace tbandit
