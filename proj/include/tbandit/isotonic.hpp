#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Weighted least-squares projections onto order-restricted cones.
//
// Every routine minimizes  sum_a w_a (x_a - v_a)^2 / 2  over its constraint
// set and returns the exact minimizer. Weights must be strictly positive and
// finite; otherwise std::domain_error is thrown.
namespace tbandit {

struct OrderedFit {
  std::vector<double> values;
  double cost = 0.0;
};

double weighted_loss(std::span<const double> x, std::span<const double> w,
                     std::span<const double> values);

/// v_1 <= ... <= v_K (pool adjacent violators).
OrderedFit isotonic_increasing(std::span<const double> x, std::span<const double> w);

/// v_1 >= ... >= v_K.
OrderedFit isotonic_decreasing(std::span<const double> x, std::span<const double> w);

/// v_1 <= ... <= v_mode >= ... >= v_K, i.e. isotonic regression over two
/// chains that share the apex `mode` (0-based).
OrderedFit unimodal_fixed_mode(std::span<const double> x, std::span<const double> w,
                               std::size_t mode);

/// Same cone with the extra restriction v_mode <= bound. Equals the
/// elementwise min of the unbounded fit and `bound`.
OrderedFit unimodal_bounded(std::span<const double> x, std::span<const double> w,
                            std::size_t mode, double bound);

/// v_1 <= ... <= v_L <= bound <= v_{L+1} <= ... <= v_K with L = left_size.
/// left_size = 0 forces every value >= bound, left_size = K every value
/// <= bound.
OrderedFit isotonic_bounded_split(std::span<const double> x, std::span<const double> w,
                                  std::size_t left_size, double bound);

// Allocation-light variants used on hot paths. `out` must have x.size()
// entries; inputs are not validated.
namespace detail {
void isotonic_increasing_into(std::span<const double> x, std::span<const double> w,
                              std::span<double> out);
void unimodal_fixed_mode_into(std::span<const double> x, std::span<const double> w,
                              std::size_t mode, std::span<double> out);
}  // namespace detail

}  // namespace tbandit
