#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "qp_oracle.hpp"
#include "tbandit/complexity.hpp"

using namespace tbandit;

namespace {

const double kLn10 = std::log(10.0);

const std::vector<double> kMu1{0.5, 1.1, 1.2, 1.3, 1.4, 5.0};
const double kS1 = 1.0;
const std::vector<double> kMu2{1.0, 2.0, 2.5};
const double kS2 = 1.55;

// Two-arm inverse times, written out from the shift/gap argument.
double two_arm_increasing(double m1, double m2, double s) {
  return (2 * s - m1 - m2) * (2 * s - m1 - m2) / 8.0;
}
double two_arm_nonmonotonic(double m1, double m2, double s) {
  return std::min((2 * s - m1 - m2) * (2 * s - m1 - m2), (m1 - m2) * (m1 - m2)) / 8.0;
}

// Exact non-monotonic optimum: for a fixed weight on the best arm, every
// challenger's pair cost is equalized at a common level v, and the weights
// must sum to one. Nested bisection / ternary search.
double nonmonotonic_exact_inverse(const std::vector<double>& mu, double s) {
  std::size_t a = 0;
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (std::abs(mu[i] - s) < std::abs(mu[a] - s)) a = i;
  std::vector<double> gaps;
  for (std::size_t b = 0; b < mu.size(); ++b) {
    if (b == a) continue;
    const double g = std::abs(mu[b] - s) - std::abs(mu[a] - s);
    gaps.push_back(g * g);
  }
  auto total = [&](double wa, double v) {
    double sum = wa;
    for (double g : gaps) {
      const double y = 2 * v / (wa * g);
      if (y >= 1) return std::numeric_limits<double>::infinity();
      sum += wa * y / (1 - y);
    }
    return sum;
  };
  auto level = [&](double wa) {
    double lo = 0, hi = INFINITY;
    for (double g : gaps) hi = std::min(hi, wa * g / 2);
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (total(wa, mid) <= 1 ? lo : hi) = mid;
    }
    return lo;
  };
  double lo = 1e-9, hi = 1 - 1e-9;
  for (int i = 0; i < 300; ++i) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (level(m1) < level(m2))
      lo = m1;
    else
      hi = m2;
  }
  return level(0.5 * (lo + hi));
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(k);
  for (double& x : w) x = e(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

// Strictly increasing means with a unique closest arm.
BanditInstance random_increasing(std::mt19937_64& rng, std::size_t k, Setting setting,
                                 bool interior) {
  std::uniform_real_distribution<double> step(0.1, 1.5), us(0.0, 1.0);
  for (;;) {
    std::vector<double> mu(k);
    mu[0] = us(rng) * 2 - 1;
    for (std::size_t a = 1; a < k; ++a) mu[a] = mu[a - 1] + step(rng);
    const double s = mu.front() - 0.5 + us(rng) * (mu.back() - mu.front() + 1.0);
    const Model m{mu, s, setting};
    const auto best = optimal_arm_set(m);
    if (best.size() != 1) continue;
    if (interior && (best.front() == 0 || best.front() + 1 == k)) continue;
    return BanditInstance(mu, s, setting);
  }
}

double mass_outside_neighbourhood(const Weights& w, std::size_t a) {
  double out = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (i + 1 < a || i > a + 1) out += w[i];
  return out;
}

}  // namespace

TEST_CASE("pairwise challenger cost examples") {
  const BanditInstance inst({2, 4}, 2.5, Setting::NonMonotonic);
  auto c = alt_cost_nonmonotonic(inst.model(), std::vector<double>{0.5, 0.5});
  CHECK(c.value == doctest::Approx(0.125));
  CHECK(c.arm == 1);
  c = alt_cost_nonmonotonic(BanditInstance({2, 4}, 5, Setting::NonMonotonic).model(),
                            std::vector<double>{0.5, 0.5});
  CHECK(c.value == doctest::Approx(0.5));
  CHECK(c.arm == 0);
  CHECK(alt_cost_nonmonotonic(inst.model(), std::vector<double>{1.0, 0.0}).value == 0.0);
  // tied best arm
  CHECK(alt_cost_nonmonotonic(BanditInstance({1, 3}, 2, Setting::NonMonotonic).model(),
                              std::vector<double>{0.5, 0.5})
            .value == 0.0);
}

TEST_CASE("non-monotonic objective equals the explicit pair formula") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    std::vector<double> mu(k);
    for (double& m : mu) m = u(rng);
    const double s = u(rng);
    const Model model{mu, s, Setting::NonMonotonic};
    if (optimal_arm_set(model).size() != 1) continue;
    const auto w = random_simplex(rng, k);
    CHECK(F_nonmonotonic(model, w).value ==
          doctest::Approx(alt_cost_nonmonotonic(model, w).value).epsilon(1e-12));
  }
}

TEST_CASE("increasing projection examples") {
  const BanditInstance inst({2, 4}, 2.5, Setting::Increasing);
  const std::vector<double> w{0.5, 0.5};
  const auto p = project_alternative_increasing(inst.model(), w, 1);
  CHECK(p.lambda[0] == doctest::Approx(1.5));
  CHECK(p.lambda[1] == doctest::Approx(3.5));
  CHECK(p.cost == doctest::Approx(0.125));
  CHECK(p.target_arm == 1);

  const auto same = project_alternative_increasing(inst.model(), w, 0);
  CHECK(same.cost == doctest::Approx(0.0));
  CHECK(same.lambda == inst.mu());

  CHECK_THROWS_AS(project_alternative_increasing(inst.model(), w, 2), std::domain_error);
}

TEST_CASE("increasing projection against the QP oracle") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-3, 3), uw(0.05, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    std::vector<double> mu(k), w(k);
    for (double& m : mu) m = u(rng);  // not necessarily increasing: empirical means
    for (double& x : w) x = uw(rng);
    const double s = u(rng);
    const std::size_t b = rng() % k;
    const Model model{mu, s, Setting::Increasing};
    const auto p = project_alternative_increasing(model, w, b);
    const auto o = oracle::solve_union(mu, w, oracle::increasing_alternative(k, b, s));
    REQUIRE(o.feasible);
    CHECK(p.cost == doctest::Approx(o.cost).epsilon(1e-8));
    // lambda is in the closure of I_b and its cost is exact
    for (std::size_t a = 0; a + 1 < k; ++a) CHECK(p.lambda[a] <= p.lambda[a + 1] + 1e-12);
    for (std::size_t a = 0; a < k; ++a)
      CHECK(std::abs(p.lambda[b] - s) <= std::abs(p.lambda[a] - s) + 1e-9);
    double cost = 0.0;
    for (std::size_t a = 0; a < k; ++a) cost += w[a] * (mu[a] - p.lambda[a]) * (mu[a] - p.lambda[a]) / 2;
    CHECK(p.cost == doctest::Approx(cost).epsilon(1e-10));
  }
}

TEST_CASE("increasing projection beats every grid point of the closure") {
  SUBCASE("K = 2, step 1e-3") {
    const std::vector<double> mu{2, 4}, w{0.3, 0.7};
    const double s = 2.5;
    const auto p = project_alternative_increasing(Model{mu, s, Setting::Increasing}, w, 1);
    double best = INFINITY;
    for (int i = 0; i <= 6000; ++i) {
      const double l0 = -1.0 + i * 1e-3;
      for (int j = 0; j <= 6000; ++j) {
        const double l1 = -1.0 + j * 1e-3;
        if (l1 < l0 || std::abs(l1 - s) > std::abs(l0 - s)) continue;
        best = std::min(best, (w[0] * (mu[0] - l0) * (mu[0] - l0) + w[1] * (mu[1] - l1) * (mu[1] - l1)) / 2);
      }
    }
    CHECK(p.cost <= best + 1e-12);
    CHECK(best - p.cost < 1e-3);
  }
  SUBCASE("K = 3, step 1e-2") {
    const std::vector<double> mu{1, 2, 2.5}, w{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const double s = 1.55;
    for (const std::size_t b : std::array<std::size_t, 2>{0, 2}) {
      const auto p = project_alternative_increasing(Model{mu, s, Setting::Increasing}, w, b);
      double best = INFINITY;
      for (int i = 0; i <= 300; ++i)
        for (int j = i; j <= 300; ++j)
          for (int l = j; l <= 300; ++l) {
            const double lam[3] = {i * 1e-2, j * 1e-2, l * 1e-2};
            // limits of increasing models where b is the unique closest arm
            const double lb = lam[b];
            bool ok = true;
            for (std::size_t a = 0; a < 3; ++a) {
              if (a < b && !(lb <= s || lam[a] + lb <= 2 * s + 1e-12)) ok = false;
              if (a > b && !(lb >= s || lam[a] + lb >= 2 * s - 1e-12)) ok = false;
            }
            if (!ok) continue;
            double c = 0;
            for (int a = 0; a < 3; ++a) c += w[a] * (mu[a] - lam[a]) * (mu[a] - lam[a]) / 2;
            best = std::min(best, c);
          }
      CHECK(p.cost <= best + 1e-12);
      CHECK(best - p.cost < 1e-3);
    }
  }
}

TEST_CASE("non-monotonic restricted projection") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-3, 3), uw(0.05, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    std::vector<double> mu(k), w(k);
    for (double& m : mu) m = u(rng);
    for (double& x : w) x = uw(rng);
    const double s = u(rng);
    const std::size_t b = rng() % k;
    const auto p = project_alternative_nonmonotonic(Model{mu, s, Setting::NonMonotonic}, w, b);
    for (std::size_t a = 0; a < k; ++a)
      CHECK(std::abs(p.lambda[b] - s) <= std::abs(p.lambda[a] - s) + 1e-9);
    // 1-D search over the common distance r reached by arm b
    const double db = std::abs(mu[b] - s);
    double best = INFINITY;
    for (int i = 0; i <= 20000; ++i) {
      const double r = db * i / 20000.0;
      double c = w[b] * (db - r) * (db - r) / 2;
      for (std::size_t a = 0; a < k; ++a) {
        const double da = std::abs(mu[a] - s);
        if (a != b && da < r) c += w[a] * (r - da) * (r - da) / 2;
      }
      best = std::min(best, c);
    }
    CHECK(p.cost <= best + 1e-12);
    CHECK(best - p.cost < 1e-6 * (1 + best));
  }
}

TEST_CASE("below-threshold projection matches the split oracle") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-3, 3), uw(0.05, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    std::vector<double> mu(k), w(k);
    for (double& m : mu) m = u(rng);
    for (double& x : w) x = uw(rng);
    const double s = u(rng);
    const std::size_t b = rng() % (k + 1);
    const auto p = project_alternative_below(Model{mu, s, Setting::BelowThreshold}, w, b);
    const std::size_t left = b == k ? 0 : b + 1;
    const auto o = oracle::solve_qp(mu, w, oracle::bounded_split(k, left, s));
    CHECK(p.cost == doctest::Approx(o.cost).epsilon(1e-8));
  }
}

TEST_CASE("F_increasing examples") {
  const BanditInstance two({2, 4}, 2.5, Setting::Increasing);
  CHECK(F_increasing(two.model(), std::vector<double>{0.5, 0.5}).value == doctest::Approx(0.125));

  const BanditInstance p2(kMu2, kS2, Setting::Increasing);
  CHECK(F_increasing(p2.model(), std::vector<double>{0, 1, 0}).value == doctest::Approx(0.0));

  const std::vector<double> w(3, 1.0 / 3);
  const auto f = F_increasing(p2.model(), w);
  double expected = INFINITY;
  for (std::size_t b : {0u, 2u})
    expected = std::min(expected,
                        oracle::solve_union(kMu2, w, oracle::increasing_alternative(3, b, kS2)).cost);
  CHECK(f.value == doctest::Approx(expected).epsilon(1e-9));
  CHECK(!f.best_arms.empty());

  const auto tied = F_increasing(BanditInstance({1, 3}, 2, Setting::Increasing).model(),
                                 std::vector<double>{0.5, 0.5});
  CHECK(tied.value == 0.0);
  CHECK(tied.subgradient == std::vector<double>{0.0, 0.0});
}

TEST_CASE("F is concave and the returned subgradient supports it") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  for (Setting setting : {Setting::Increasing, Setting::NonMonotonic, Setting::BelowThreshold}) {
    for (int trial = 0; trial < 150; ++trial) {
      const std::size_t k = 2 + rng() % 5;
      const auto inst = random_increasing(rng, k, setting == Setting::BelowThreshold
                                                      ? Setting::Increasing
                                                      : setting,
                                          false);
      if (setting == Setting::BelowThreshold && !(inst.mu().front() <= inst.threshold())) continue;
      const Model m{inst.mu(), inst.threshold(), setting};
      if (optimal_arm_set(m).size() != 1) continue;
      const auto w1 = random_simplex(rng, k), w2 = random_simplex(rng, k);
      const double alpha = ua(rng);
      std::vector<double> mix(k);
      for (std::size_t a = 0; a < k; ++a) mix[a] = alpha * w1[a] + (1 - alpha) * w2[a];
      const auto f1 = evaluate_objective(m, w1), f2 = evaluate_objective(m, w2);
      CHECK(evaluate_objective(m, mix).value >= alpha * f1.value + (1 - alpha) * f2.value - 1e-9);
      // supergradient inequality at w1, tested at w2
      double linear = f1.value;
      for (std::size_t a = 0; a < k; ++a) linear += f1.subgradient[a] * (w2[a] - w1[a]);
      CHECK(f2.value <= linear + 1e-9);
    }
  }
}

TEST_CASE("solve_complexity on the reference problems") {
  const auto p1i = solve_complexity(BanditInstance(kMu1, kS1, Setting::Increasing));
  const auto p1m = solve_complexity(BanditInstance(kMu1, kS1, Setting::NonMonotonic));
  const auto p2i = solve_complexity(BanditInstance(kMu2, kS2, Setting::Increasing));
  const auto p2m = solve_complexity(BanditInstance(kMu2, kS2, Setting::NonMonotonic));
  CHECK(p1i.t_star * kLn10 == doctest::Approx(247).epsilon(0.02));
  CHECK(p1m.t_star * kLn10 == doctest::Approx(2033).epsilon(0.02));
  CHECK(p2i.t_star * kLn10 == doctest::Approx(1842).epsilon(0.02));
  CHECK(p2m.t_star * kLn10 == doctest::Approx(1861).epsilon(0.02));
  for (const auto* s : {&p1i, &p1m, &p2i, &p2m}) {
    CHECK(on_simplex(s->weights, 1e-12));
    CHECK(s->f_value == doctest::Approx(1.0 / s->t_star));
    CHECK(s->gap_certificate >= 0.0);
  }
}

TEST_CASE("non-monotonic solver against the equalization oracle") {
  for (const auto& [mu, s] : {std::pair{kMu1, kS1}, std::pair{kMu2, kS2}}) {
    const double exact = nonmonotonic_exact_inverse(mu, s);
    const auto sol = solve_complexity(BanditInstance(mu, s, Setting::NonMonotonic));
    CHECK(sol.f_value <= exact * (1 + 1e-9));
    CHECK(sol.f_value >= exact * (1 - 5e-3));
  }
}

TEST_CASE("two-arm closed forms") {
  auto r = two_arm_closed_form(BanditInstance({2, 4}, 2.5, Setting::Increasing));
  CHECK(r.increasing == doctest::Approx(0.125));
  CHECK(r.nonmonotonic == doctest::Approx(0.125));
  r = two_arm_closed_form(BanditInstance({2, 4}, 5, Setting::Increasing));
  CHECK(r.increasing == doctest::Approx(2.0));
  CHECK(r.nonmonotonic == doctest::Approx(0.5));
  r = two_arm_closed_form(BanditInstance({2, 4}, 3, Setting::Increasing));
  CHECK(r.increasing == 0.0);
  CHECK(r.nonmonotonic == 0.0);
  CHECK_THROWS_AS(two_arm_closed_form(BanditInstance({1, 2, 3}, 3, Setting::Increasing)),
                  std::domain_error);
}

TEST_CASE("two-arm solver agreement") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    double m1 = u(rng), m2 = u(rng);
    if (m1 > m2) std::swap(m1, m2);
    if (m2 - m1 < 1e-3) continue;
    const double s = u(rng);
    if (std::abs(2 * s - m1 - m2) < 1e-3) continue;
    const auto inc = solve_complexity(BanditInstance({m1, m2}, s, Setting::Increasing));
    const auto non = solve_complexity(BanditInstance({m1, m2}, s, Setting::NonMonotonic));
    CHECK(inc.f_value == doctest::Approx(two_arm_increasing(m1, m2, s)).epsilon(1e-6));
    CHECK(non.f_value == doctest::Approx(two_arm_nonmonotonic(m1, m2, s)).epsilon(1e-6));
    if (m1 <= s && s <= m2) CHECK(inc.f_value == doctest::Approx(non.f_value).epsilon(1e-9));
  }
}

TEST_CASE("tied optimal arm") {
  const auto sol = solve_complexity(BanditInstance({1, 3}, 2, Setting::NonMonotonic));
  CHECK(std::isinf(sol.t_star));
  CHECK(sol.f_value == 0.0);
  CHECK(sol.weights == std::vector<double>{0.5, 0.5});
}

TEST_CASE("D+ and D- formulas") {
  const BanditInstance p2(kMu2, kS2, Setting::Increasing);
  const std::array<double, 3> third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  // a* = arm 2 (0-based 1); neighbours at 1 and 2.5
  const double expected = (0.0 + 0.25 / 2 + 0.81 / 2) / 3;
  CHECK(d_plus(p2.model(), 1, 1.5, third) == doctest::Approx(expected).epsilon(1e-14));
  // D- at theta = 1.7: arm 1 moves to 1.4, arm 2 to 1.7, arm 3 untouched
  CHECK(d_minus(p2.model(), 1, 1.7, third) ==
        doctest::Approx((0.16 / 2 + 0.09 / 2) / 3).epsilon(1e-14));
  CHECK(d_plus(p2.model(), 1, 2.0, std::array<double, 3>{1, 0, 0}) == 0.0);
  CHECK(std::isinf(d_minus(p2.model(), 0, 1.6, third)));
  CHECK(std::isinf(d_plus(p2.model(), 2, 1.5, third)));
}

TEST_CASE("three-point reduction") {
  const BanditInstance p2(kMu2, kS2, Setting::Increasing);
  const auto tp = three_point_characteristic_time(p2);
  CHECK(tp.t_star == doctest::Approx(1842 / kLn10).epsilon(0.005));
  CHECK(tp.t_star == doctest::Approx(solve_complexity(p2).t_star).epsilon(1e-4));

  const BanditInstance two({2, 4}, 2.5, Setting::Increasing);
  CHECK(three_point_characteristic_time(two).f_value ==
        doctest::Approx(two_arm_increasing(2, 4, 2.5)).epsilon(1e-6));
  const BanditInstance two_up({2, 4}, 5, Setting::Increasing);
  CHECK(three_point_characteristic_time(two_up).f_value ==
        doctest::Approx(two_arm_increasing(2, 4, 5)).epsilon(1e-6));

  CHECK_THROWS_AS(three_point_characteristic_time(BanditInstance(kMu2, kS2, Setting::NonMonotonic)),
                  std::domain_error);
}

TEST_CASE("gap bounds") {
  const auto b2 = characteristic_time_bounds(BanditInstance(kMu2, kS2, Setting::Increasing));
  CHECK(b2.lower == doctest::Approx(800));
  CHECK(b2.upper == doctest::Approx(800 + 800 + 1 / 0.245));
  const auto b1 = characteristic_time_bounds(BanditInstance(kMu1, kS1, Setting::Increasing));
  CHECK(b1.lower == doctest::Approx(8 / 0.09));
  CHECK(b1.upper == doctest::Approx(8 / 0.16 + 8 / 0.09 + 8 / 0.09));
  CHECK(b1.lower <= 247 / kLn10);
  CHECK(247 / kLn10 <= b1.upper);
  // symmetric neighbours: upper = 3 lower
  const auto sym = characteristic_time_bounds(BanditInstance({0, 1.2, 1.6}, 1, Setting::Increasing));
  CHECK(sym.upper == doctest::Approx(3 * sym.lower));
  CHECK_THROWS_AS(characteristic_time_bounds(BanditInstance({2, 4}, 2.5, Setting::Increasing)),
                  std::domain_error);
}

TEST_CASE("increasing weights live on three arms; structure ordering") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 3 + rng() % 4;
    const auto inc = random_increasing(rng, k, Setting::Increasing, true);
    const auto sol = solve_complexity(inc);
    const std::size_t a = optimal_arm(inc).index;
    CHECK(mass_outside_neighbourhood(sol.weights, a) <= 1e-4);
    const auto bounds = characteristic_time_bounds(inc);
    const auto tp = three_point_characteristic_time(inc);
    CHECK(bounds.lower <= tp.t_star * (1 + 1e-9));
    CHECK(tp.t_star <= bounds.upper * (1 + 1e-9));
    const auto non = solve_complexity(inc.with_setting(Setting::NonMonotonic));
    CHECK(sol.t_star <= non.t_star * (1 + 1e-6));
  }
}

TEST_CASE("below-threshold closed form") {
  const BanditInstance p2(kMu2, kS2, Setting::BelowThreshold);
  const auto sol = below_threshold_closed_form(p2);
  const double d1 = 0.55 * 0.55, d2 = 0.45 * 0.45;
  CHECK(sol.f_value == doctest::Approx(1 / (2 / d1 + 2 / d2)).epsilon(1e-12));
  CHECK(sol.t_star == doctest::Approx(16.49).epsilon(1e-3));
  CHECK(sol.weights[0] + sol.weights[1] == doctest::Approx(1.0));
  CHECK(sol.weights[2] == 0.0);
  CHECK(solve_complexity(p2).t_star == sol.t_star);

  const auto sym = below_threshold_closed_form(BanditInstance({0, 2}, 1, Setting::BelowThreshold));
  CHECK(sym.weights[0] == doctest::Approx(0.5));
  CHECK(sym.weights[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(below_threshold_closed_form(BanditInstance({0, 2}, 3, Setting::BelowThreshold)),
                  std::domain_error);
}

TEST_CASE("below-threshold closed form maximizes the objective") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    const auto inc = random_increasing(rng, k, Setting::Increasing, false);
    const Model m{inc.mu(), inc.threshold(), Setting::BelowThreshold};
    const auto best = optimal_arm_set(m);
    if (best.size() != 1 || best.front() + 1 == k) continue;
    const auto sol = below_threshold_closed_form(m);
    CHECK(F_below(m, sol.weights).value == doctest::Approx(sol.f_value).epsilon(1e-9));
    for (int j = 0; j < 50; ++j) CHECK(F_below(m, random_simplex(rng, k)).value <= sol.f_value + 1e-12);
  }
}

TEST_CASE("kl and the sample lower bound") {
  CHECK(kl_bernoulli(0.1, 0.9) == doctest::Approx(0.8 * std::log(9.0)).epsilon(1e-14));
  CHECK(kl_bernoulli(0.1, 0.9) == doctest::Approx(1.7578).epsilon(1e-4));
  CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
  const BanditInstance p2(kMu2, kS2, Setting::Increasing);
  CHECK(lower_bound_samples(p2, 0.5) == 0.0);
  CHECK(lower_bound_samples(p2, 0.1) == doctest::Approx(1406).epsilon(0.01));
  CHECK_THROWS_AS(lower_bound_samples(p2, 0.0), std::domain_error);
  CHECK_THROWS_AS(lower_bound_samples(p2, 0.6), std::domain_error);
}

TEST_CASE("simplex projection") {
  std::vector<double> v{0.8, 0.8, -1.0};
  project_to_simplex(v);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK(v[2] == 0.0);
  std::mt19937_64 rng(73);
  std::normal_distribution<double> n(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + rng() % 6);
    for (double& e : x) e = n(rng);
    std::vector<double> p(x);
    project_to_simplex(p);
    CHECK(on_simplex(p, 1e-12));
    // optimality: <x - p, q - p> <= 0 for simplex points q
    const auto q = random_simplex(rng, x.size());
    double inner = 0;
    for (std::size_t a = 0; a < x.size(); ++a) inner += (x[a] - p[a]) * (q[a] - p[a]);
    CHECK(inner <= 1e-12);
  }
}
