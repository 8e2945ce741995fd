#include "tbandit/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tbandit/isotonic.hpp"

namespace tbandit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

thread_local std::vector<double> tl_x, tl_w, tl_fit, tl_lambda, tl_sort;

void check_weights(const Model& model, std::span<const double> w) {
  if (w.size() != model.arms()) throw std::domain_error("weights and means differ in length");
  for (double x : w)
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("weights must be nonnegative");
}

double loss(std::span<const double> mu, std::span<const double> w,
            std::span<const double> lambda) {
  return weighted_loss(mu, w, lambda);
}

// Projection onto the closure of {lambda increasing, closest arm b}. When
// mu_b <= S the apex value stays below S and, after reflecting the arms
// above b through S, the feasible set is the unimodal cone with mode b and
// apex <= S. The case mu_b > S is its mirror image (reflect and reverse).
double project_increasing_into(std::span<const double> mu, std::span<const double> w,
                               double s, std::size_t b, std::span<double> lambda) {
  const std::size_t k = mu.size();
  tl_x.resize(k);
  tl_w.resize(k);
  tl_fit.resize(k);
  const bool mirrored = mu[b] > s;
  const std::size_t mode = mirrored ? k - 1 - b : b;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t a = mirrored ? k - 1 - i : i;
    const double v = mirrored ? 2.0 * s - mu[a] : mu[a];
    tl_x[i] = i <= mode ? v : 2.0 * s - v;
    tl_w[i] = std::max(w[a], kWeightFloor);
  }
  detail::unimodal_fixed_mode_into(tl_x, tl_w, mode, tl_fit);
  for (std::size_t i = 0; i < k; ++i) {
    const double f = std::min(tl_fit[i], s);
    const double v = i <= mode ? f : 2.0 * s - f;
    const std::size_t a = mirrored ? k - 1 - i : i;
    lambda[a] = mirrored ? 2.0 * s - v : v;
  }
  return loss(mu, w, lambda);
}

// Projection onto {lambda_1 <= ... <= lambda_L <= S <= lambda_{L+1} <= ...}.
double project_split_into(std::span<const double> mu, std::span<const double> w, double s,
                          std::size_t left_size, std::span<double> lambda) {
  const std::size_t k = mu.size();
  tl_w.resize(k);
  for (std::size_t a = 0; a < k; ++a) tl_w[a] = std::max(w[a], kWeightFloor);
  std::span<const double> ws(tl_w);
  if (left_size > 0) {
    detail::isotonic_increasing_into(mu.first(left_size), ws.first(left_size),
                                     lambda.first(left_size));
    for (double& v : lambda.first(left_size)) v = std::min(v, s);
  }
  if (left_size < k) {
    const std::size_t n = k - left_size;
    detail::isotonic_increasing_into(mu.last(n), ws.last(n), lambda.last(n));
    for (double& v : lambda.last(n)) v = std::max(v, s);
  }
  return loss(mu, w, lambda);
}

// Closest arm becomes b: b moves to distance r from S and every arm closer
// than r is pushed out to r. r is the weighted mean of the distances of b
// and of the pushed arms; arms are added by increasing distance.
double project_nonmonotonic_into(std::span<const double> mu, std::span<const double> w,
                                 double s, std::size_t b, std::span<double> lambda) {
  const std::size_t k = mu.size();
  auto dist = [&](std::size_t a) { return std::abs(mu[a] - s); };
  thread_local std::vector<std::size_t> order;
  order.clear();
  for (std::size_t a = 0; a < k; ++a)
    if (a != b) order.push_back(a);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return dist(x) < dist(y) || (dist(x) == dist(y) && x < y);
  });
  double sum_wd = std::max(w[b], kWeightFloor) * dist(b);
  double sum_w = std::max(w[b], kWeightFloor);
  for (std::size_t a : order) {
    if (!(dist(a) < sum_wd / sum_w)) break;
    const double wa = std::max(w[a], kWeightFloor);
    sum_wd += wa * dist(a);
    sum_w += wa;
  }
  const double r = sum_wd / sum_w;
  auto place = [&](std::size_t a, double d) {
    return mu[a] >= s ? s + d : s - d;
  };
  for (std::size_t a = 0; a < k; ++a)
    lambda[a] = a == b ? place(a, r) : place(a, std::max(dist(a), r));
  return loss(mu, w, lambda);
}


// min over candidate targets; subgradient from the smallest-index minimizer.
ObjectiveValue min_over_targets(const Model& model, std::span<const double>,
                                std::span<const std::size_t> targets,
                                const std::function<double(std::size_t, std::span<double>)>& project) {
  const std::size_t k = model.arms();
  ObjectiveValue out;
  out.subgradient.assign(k, 0.0);
  thread_local std::vector<double> costs;
  costs.assign(targets.size(), kInf);
  tl_lambda.resize(k);
  double best = kInf;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    costs[i] = project(targets[i], tl_lambda);
    best = std::min(best, costs[i]);
  }
  std::size_t first = targets.size();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (costs[i] <= best + kBestArmTolerance) {
      out.best_arms.push_back(targets[i]);
      if (first == targets.size()) first = i;
    }
  }
  out.value = best;
  project(targets[first], tl_lambda);
  for (std::size_t a = 0; a < k; ++a) {
    const double d = model.mu[a] - tl_lambda[a];
    out.subgradient[a] = 0.5 * d * d;
  }
  return out;
}

ObjectiveValue tied_objective(std::size_t arms) {
  ObjectiveValue out;
  out.subgradient.assign(arms, 0.0);
  return out;
}

}  // namespace

void project_to_simplex(std::span<double> w) {
  tl_sort.assign(w.begin(), w.end());
  std::sort(tl_sort.begin(), tl_sort.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t j = 0; j < tl_sort.size(); ++j) {
    cumulative += tl_sort[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (tl_sort[j] - candidate > 0.0) shift = candidate;
  }
  for (double& x : w) x = std::max(x - shift, 0.0);
}

ChallengerCost alt_cost_nonmonotonic(const Model& model, std::span<const double> w) {
  check_weights(model, w);
  const OptimalArm opt = optimal_arm(model);
  if (!opt.unique()) return {0.0, opt.index};
  const std::size_t a = opt.index;
  const double s = model.threshold;
  ChallengerCost best{kInf, a};
  for (std::size_t b = 0; b < model.arms(); ++b) {
    if (b == a) continue;
    const double same = model.mu[a] - model.mu[b];
    const double reflected = 2.0 * s - model.mu[a] - model.mu[b];
    const double gap2 = std::min(same * same, reflected * reflected);
    const double denom = w[a] + w[b];
    const double value = denom > 0.0 ? w[a] * w[b] / (2.0 * denom) * gap2 : 0.0;
    if (value < best.value) best = {value, b};
  }
  return best;
}

Projection project_alternative_increasing(const Model& model, std::span<const double> w,
                                          std::size_t b) {
  check_weights(model, w);
  if (b >= model.arms()) throw std::domain_error("target arm out of range");
  Projection p{std::vector<double>(model.arms()), 0.0, b};
  p.cost = project_increasing_into(model.mu, w, model.threshold, b, p.lambda);
  return p;
}

Projection project_alternative_nonmonotonic(const Model& model, std::span<const double> w,
                                            std::size_t b) {
  check_weights(model, w);
  if (b >= model.arms()) throw std::domain_error("target arm out of range");
  Projection p{std::vector<double>(model.arms()), 0.0, b};
  p.cost = project_nonmonotonic_into(model.mu, w, model.threshold, b, p.lambda);
  return p;
}

Projection project_alternative_below(const Model& model, std::span<const double> w,
                                     std::size_t b) {
  check_weights(model, w);
  if (b > model.arms()) throw std::domain_error("target arm out of range");
  Projection p{std::vector<double>(model.arms()), 0.0, b};
  const std::size_t left = b == model.arms() ? 0 : b + 1;
  p.cost = project_split_into(model.mu, w, model.threshold, left, p.lambda);
  return p;
}

Projection project_alternative(const Model& model, std::span<const double> w, std::size_t b) {
  switch (model.setting) {
    case Setting::Increasing:
      return project_alternative_increasing(model, w, b);
    case Setting::BelowThreshold:
      return project_alternative_below(model, w, b);
    case Setting::NonMonotonic:
      break;
  }
  return project_alternative_nonmonotonic(model, w, b);
}

ObjectiveValue F_increasing(const Model& model, std::span<const double> w) {
  check_weights(model, w);
  const OptimalArm opt = optimal_arm(model);
  if (!opt.unique()) return tied_objective(model.arms());
  thread_local std::vector<std::size_t> targets;
  targets.clear();
  for (std::size_t b = 0; b < model.arms(); ++b)
    if (b != opt.index) targets.push_back(b);
  return min_over_targets(model, w, targets, [&](std::size_t b, std::span<double> lambda) {
    return project_increasing_into(model.mu, w, model.threshold, b, lambda);
  });
}

ObjectiveValue F_nonmonotonic(const Model& model, std::span<const double> w) {
  check_weights(model, w);
  const std::size_t k = model.arms();
  const OptimalArm opt = optimal_arm(model);
  if (!opt.unique()) return tied_objective(k);
  const std::size_t a = opt.index;
  const double s = model.threshold;
  const double da = std::abs(model.mu[a] - s);

  ObjectiveValue out;
  out.subgradient.assign(k, 0.0);
  thread_local std::vector<double> costs;
  costs.assign(k, kInf);
  double best = kInf;
  for (std::size_t b = 0; b < k; ++b) {
    if (b == a) continue;
    const double gap = std::abs(model.mu[b] - s) - da;
    const double denom = w[a] + w[b];
    costs[b] = denom > 0.0 ? w[a] * w[b] / (2.0 * denom) * gap * gap : 0.0;
    best = std::min(best, costs[b]);
  }
  for (std::size_t b = 0; b < k; ++b)
    if (b != a && costs[b] <= best + kBestArmTolerance) out.best_arms.push_back(b);
  out.value = best;

  // Both arms meet at the weighted mean distance from S.
  const std::size_t b = out.best_arms.front();
  const double db = std::abs(model.mu[b] - s);
  const double denom = w[a] + w[b];
  const double r = denom > 0.0 ? (w[a] * da + w[b] * db) / denom : 0.5 * (da + db);
  out.subgradient[a] = 0.5 * (da - r) * (da - r);
  out.subgradient[b] = 0.5 * (db - r) * (db - r);
  return out;
}

ObjectiveValue F_below(const Model& model, std::span<const double> w) {
  check_weights(model, w);
  const OptimalArm opt = optimal_arm(model);
  if (!opt.unique()) return tied_objective(model.arms());
  const std::size_t k = model.arms();
  thread_local std::vector<std::size_t> targets;
  targets.clear();
  for (std::size_t b = 0; b <= k; ++b)
    if (b != opt.index) targets.push_back(b);
  return min_over_targets(model, w, targets, [&](std::size_t b, std::span<double> lambda) {
    return project_split_into(model.mu, w, model.threshold, b == k ? 0 : b + 1, lambda);
  });
}

ObjectiveValue evaluate_objective(const Model& model, std::span<const double> w) {
  switch (model.setting) {
    case Setting::Increasing:
      return F_increasing(model, w);
    case Setting::BelowThreshold:
      return F_below(model, w);
    case Setting::NonMonotonic:
      break;
  }
  return F_nonmonotonic(model, w);
}

ComplexitySolution solve_complexity(const Model& model, const SolverOptions& options) {
  if (model.arms() < 2) throw std::domain_error("need at least two arms");
  if (model.setting == Setting::BelowThreshold) return below_threshold_closed_form(model);

  const std::size_t k = model.arms();
  const auto argmin = optimal_arm_set(model);
  if (argmin.size() != 1) {
    ComplexitySolution tied;
    tied.weights = uniform_over(k, argmin);
    tied.t_star = kInf;
    tied.f_value = 0.0;
    return tied;
  }

  Weights w = options.initial.empty() ? uniform_weights(k) : options.initial;
  if (w.size() != k) throw std::domain_error("initial weights have the wrong length");
  project_to_simplex(w);

  ObjectiveValue cur = evaluate_objective(model, w);
  const double g_max = *std::max_element(cur.subgradient.begin(), cur.subgradient.end());

  ComplexitySolution sol;
  sol.weights = w;
  sol.f_value = cur.value;
  double upper = g_max;  // F is homogeneous: F(w') <= max_a g_a for any supergradient g
  double anchor_value = cur.value;
  std::size_t anchor_iter = 0;
  sol.converged = false;

  std::size_t k_iter = 0;
  while (k_iter < options.max_iterations) {
    ++k_iter;
    // Only the component tangent to the simplex moves the iterate.
    const double mean =
        std::accumulate(cur.subgradient.begin(), cur.subgradient.end(), 0.0) / static_cast<double>(k);
    double norm2 = 0.0;
    for (double g : cur.subgradient) norm2 += (g - mean) * (g - mean);
    if (!(norm2 > 0.0)) {
      sol.converged = true;
      break;
    }
    const double step = options.step_scale / (std::sqrt(norm2) * std::sqrt(static_cast<double>(k_iter)));
    for (std::size_t a = 0; a < k; ++a) w[a] += step * (cur.subgradient[a] - mean);
    project_to_simplex(w);
    cur = evaluate_objective(model, w);
    upper = std::min(upper, *std::max_element(cur.subgradient.begin(), cur.subgradient.end()));
    if (cur.value > sol.f_value) {
      sol.f_value = cur.value;
      sol.weights = w;
    }
    if (sol.f_value - anchor_value >= options.tolerance * std::abs(sol.f_value)) {
      anchor_value = sol.f_value;
      anchor_iter = k_iter;
    } else if (k_iter - anchor_iter >= options.window) {
      sol.converged = true;
      break;
    }
  }
  sol.iterations = k_iter;
  sol.gap_certificate = std::max(upper - sol.f_value, 0.0);
  sol.t_star = sol.f_value > 0.0 ? 1.0 / sol.f_value : kInf;
  return sol;
}

TwoArmInverseTimes two_arm_closed_form(const BanditInstance& instance) {
  if (instance.arms() != 2) throw std::domain_error("two-arm closed form needs K = 2");
  const double s = instance.threshold();
  const double m1 = instance.mu()[0];
  const double m2 = instance.mu()[1];
  const double shift = (2.0 * s - m1 - m2) * (2.0 * s - m1 - m2);
  const double gap = (m1 - m2) * (m1 - m2);
  return {shift / 8.0, std::min(shift, gap) / 8.0};
}

double d_plus(const Model& model, std::size_t optimal, double theta,
              const std::array<double, 3>& w3) {
  if (optimal + 1 >= model.arms()) return kInf;
  const auto& mu = model.mu;
  const double s = model.threshold;
  double value = 0.0;
  if (optimal > 0) {
    const double d = mu[optimal - 1] - std::min(mu[optimal - 1], theta);
    value += w3[0] * d * d / 2.0;
  }
  value += w3[1] * (mu[optimal] - theta) * (mu[optimal] - theta) / 2.0;
  const double up = mu[optimal + 1] - (2.0 * s - theta);
  value += w3[2] * up * up / 2.0;
  return value;
}

double d_minus(const Model& model, std::size_t optimal, double theta,
               const std::array<double, 3>& w3) {
  if (optimal == 0) return kInf;
  const auto& mu = model.mu;
  const double s = model.threshold;
  double value = 0.0;
  const double down = mu[optimal - 1] - (2.0 * s - theta);
  value += w3[0] * down * down / 2.0;
  value += w3[1] * (mu[optimal] - theta) * (mu[optimal] - theta) / 2.0;
  if (optimal + 1 < model.arms()) {
    const double d = mu[optimal + 1] - std::max(mu[optimal + 1], theta);
    value += w3[2] * d * d / 2.0;
  }
  return value;
}

namespace {

struct ThetaMin {
  double value;
  double theta;
};

// Convex function of theta on [lo, hi]: coarse grid, then golden section on
// the bracket around the best grid point.
ThetaMin minimize_convex(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kGrid = 64;
  ThetaMin best{kInf, lo};
  for (int i = 0; i <= kGrid; ++i) {
    const double t = lo + (hi - lo) * i / kGrid;
    const double v = f(t);
    if (v < best.value) best = {v, t};
  }
  const double cell = (hi - lo) / kGrid;
  double a = std::max(lo, best.theta - cell);
  double b = std::min(hi, best.theta + cell);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm < best.value) best = {fm, mid};
  return best;
}

struct ThreePointEval {
  double value;
  std::array<double, 3> subgradient;
};

ThreePointEval three_point_objective(const Model& model, std::size_t opt,
                                     const std::array<double, 3>& w3) {
  const auto& mu = model.mu;
  const double s = model.threshold;
  const std::array<double, 3> unit0{1.0, 0.0, 0.0}, unit1{0.0, 1.0, 0.0}, unit2{0.0, 0.0, 1.0};
  ThetaMin plus{kInf, s};
  ThetaMin minus{kInf, s};
  if (opt + 1 < model.arms())
    plus = minimize_convex([&](double t) { return d_plus(model, opt, t, w3); },
                           2.0 * s - mu[opt + 1], s);
  if (opt > 0)
    minus = minimize_convex([&](double t) { return d_minus(model, opt, t, w3); }, s,
                            2.0 * s - mu[opt - 1]);
  ThreePointEval out{};
  if (plus.value <= minus.value) {
    out.value = plus.value;
    out.subgradient = {d_plus(model, opt, plus.theta, unit0),
                       d_plus(model, opt, plus.theta, unit1),
                       d_plus(model, opt, plus.theta, unit2)};
  } else {
    out.value = minus.value;
    out.subgradient = {d_minus(model, opt, minus.theta, unit0),
                       d_minus(model, opt, minus.theta, unit1),
                       d_minus(model, opt, minus.theta, unit2)};
  }
  return out;
}

}  // namespace

ThreePointSolution three_point_characteristic_time(const BanditInstance& instance) {
  if (instance.setting() != Setting::Increasing)
    throw std::domain_error("three-point reduction needs the Increasing setting");
  const Model model = instance.model();
  const OptimalArm opt = optimal_arm(model);
  ThreePointSolution sol;
  if (!opt.unique()) {
    sol.t_star = kInf;
    return sol;
  }
  std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  ThreePointEval cur = three_point_objective(model, opt.index, w);
  const double scale =
      1.0 / (*std::max_element(cur.subgradient.begin(), cur.subgradient.end()) + 1e-12);
  sol.f_value = cur.value;
  sol.weights = w;
  double anchor = cur.value;
  std::size_t anchor_iter = 0;
  constexpr std::size_t kMaxIter = 20000;
  constexpr std::size_t kWindow = 500;
  for (std::size_t k = 1; k <= kMaxIter; ++k) {
    const double step = scale / std::sqrt(static_cast<double>(k));
    for (int i = 0; i < 3; ++i) w[i] += step * cur.subgradient[i];
    project_to_simplex(w);
    cur = three_point_objective(model, opt.index, w);
    if (cur.value > sol.f_value) {
      sol.f_value = cur.value;
      sol.weights = w;
    }
    if (sol.f_value - anchor >= 1e-14) {
      anchor = sol.f_value;
      anchor_iter = k;
    } else if (k - anchor_iter >= kWindow) {
      break;
    }
  }
  sol.t_star = sol.f_value > 0.0 ? 1.0 / sol.f_value : kInf;
  return sol;
}

TimeBounds characteristic_time_bounds(const BanditInstance& instance) {
  if (instance.setting() != Setting::Increasing)
    throw std::domain_error("bounds need the Increasing setting");
  const OptimalArm opt = optimal_arm(instance);
  if (!opt.unique()) throw std::domain_error("bounds need a unique optimal arm");
  if (opt.index == 0 || opt.index + 1 == instance.arms())
    throw std::domain_error("bounds need an interior optimal arm");
  const auto& mu = instance.mu();
  const double s = instance.threshold();
  const std::size_t a = opt.index;
  const double below = (2.0 * s - mu[a - 1] - mu[a]) * (2.0 * s - mu[a - 1] - mu[a]) / 8.0;
  const double above = (2.0 * s - mu[a + 1] - mu[a]) * (2.0 * s - mu[a + 1] - mu[a]) / 8.0;
  const double smallest = std::min(below, above);
  return {1.0 / smallest, 1.0 / below + 1.0 / smallest + 1.0 / above};
}

ComplexitySolution below_threshold_closed_form(const Model& model) {
  const std::size_t k = model.arms();
  const OptimalArm opt = optimal_arm(model);  // restricted to means <= S
  if (opt.index + 1 >= k)
    throw std::domain_error("no arm above the closest arm below the threshold");
  const double s = model.threshold;
  const double d1 = (s - model.mu[opt.index]) * (s - model.mu[opt.index]);
  const double d2 = (model.mu[opt.index + 1] - s) * (model.mu[opt.index + 1] - s);
  ComplexitySolution sol;
  sol.weights.assign(k, 0.0);
  if (d1 + d2 == 0.0) {
    sol.weights[opt.index] = sol.weights[opt.index + 1] = 0.5;
  } else {
    // Inverse-cost weights 2/d1 : 2/d2, written without dividing by zero.
    sol.weights[opt.index] = d2 / (d1 + d2);
    sol.weights[opt.index + 1] = d1 / (d1 + d2);
  }
  sol.f_value = d1 + d2 > 0.0 ? d1 * d2 / (2.0 * (d1 + d2)) : 0.0;
  sol.t_star = sol.f_value > 0.0 ? 1.0 / sol.f_value : kInf;
  return sol;
}

double kl_bernoulli(double p, double q) {
  auto term = [](double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double lower_bound_samples(double t_star, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::domain_error("delta must lie in (0, 1/2]");
  // kl(delta, 1 - delta) = (1 - 2 delta) log((1 - delta) / delta)
  const double kl = (1.0 - 2.0 * delta) * std::log((1.0 - delta) / delta);
  if (kl == 0.0) return 0.0;
  return t_star * kl;
}

double lower_bound_samples(const BanditInstance& instance, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::domain_error("delta must lie in (0, 1/2]");
  return lower_bound_samples(solve_complexity(instance).t_star, delta);
}

}  // namespace tbandit
