#include "tbandit/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tbandit {
namespace {

struct Block {
  double sum_wx;
  double sum_w;
  std::size_t begin;
  std::size_t end;  // exclusive
  double value() const noexcept { return sum_wx / sum_w; }
};

// Scratch reused across calls on the same thread; the hot paths run
// millions of tiny regressions.
thread_local std::vector<Block> left_scratch;
thread_local std::vector<Block> right_scratch;

// PAVA over x[i] for i in [0, n) visited in order `index(i)`; produces
// blocks that are nondecreasing in visit order.
template <class Index>
void pava(std::span<const double> x, std::span<const double> w, std::size_t n, Index index,
          std::vector<Block>& blocks) {
  blocks.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = index(i);
    blocks.push_back(Block{w[a] * x[a], w[a], i, i + 1});
    while (blocks.size() > 1) {
      Block& last = blocks[blocks.size() - 1];
      Block& prev = blocks[blocks.size() - 2];
      if (prev.value() < last.value()) break;
      prev.sum_wx += last.sum_wx;
      prev.sum_w += last.sum_w;
      prev.end = last.end;
      blocks.pop_back();
    }
  }
}

void validate(std::span<const double> x, std::span<const double> w) {
  if (x.empty()) throw std::domain_error("empty input");
  if (x.size() != w.size()) throw std::domain_error("values and weights differ in length");
  for (double v : x)
    if (!std::isfinite(v)) throw std::domain_error("values must be finite");
  for (double v : w)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("weights must be positive");
}

OrderedFit finish(std::span<const double> x, std::span<const double> w,
                  std::vector<double> values) {
  OrderedFit fit{std::move(values), 0.0};
  fit.cost = weighted_loss(x, w, fit.values);
  return fit;
}

}  // namespace

double weighted_loss(std::span<const double> x, std::span<const double> w,
                     std::span<const double> values) {
  double total = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - values[a];
    total += w[a] * d * d;
  }
  return 0.5 * total;
}

namespace detail {

void isotonic_increasing_into(std::span<const double> x, std::span<const double> w,
                              std::span<double> out) {
  auto& blocks = left_scratch;
  pava(x, w, x.size(), [](std::size_t i) { return i; }, blocks);
  for (const Block& b : blocks)
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(b.begin),
              out.begin() + static_cast<std::ptrdiff_t>(b.end), b.value());
}

// The apex couples the two chains. For a fixed apex value m the optimal
// chains are min(chain isotonic fit, m); stationarity in m then pools the
// apex with every chain block whose value exceeds the pooled mean. Taking
// blocks in decreasing value order reaches that fixed point.
void unimodal_fixed_mode_into(std::span<const double> x, std::span<const double> w,
                              std::size_t mode, std::span<double> out) {
  const std::size_t k = x.size();
  auto& left = left_scratch;    // chain 0 .. mode-1, increasing toward apex
  auto& right = right_scratch;  // chain k-1 .. mode+1, increasing toward apex
  pava(x, w, mode, [](std::size_t i) { return i; }, left);
  pava(x, w, k - mode - 1, [k](std::size_t i) { return k - 1 - i; }, right);

  double sum_wx = w[mode] * x[mode];
  double sum_w = w[mode];
  std::size_t left_top = left.size();    // blocks [left_top, size) merged
  std::size_t right_top = right.size();
  for (;;) {
    const double mean = sum_wx / sum_w;
    const double lv = left_top > 0 ? left[left_top - 1].value() : -INFINITY;
    const double rv = right_top > 0 ? right[right_top - 1].value() : -INFINITY;
    if (lv >= rv && lv > mean) {
      --left_top;
      sum_wx += left[left_top].sum_wx;
      sum_w += left[left_top].sum_w;
    } else if (rv > lv && rv > mean) {
      --right_top;
      sum_wx += right[right_top].sum_wx;
      sum_w += right[right_top].sum_w;
    } else {
      break;
    }
  }
  const double apex = sum_wx / sum_w;
  out[mode] = apex;
  for (std::size_t j = 0; j < left.size(); ++j) {
    const double v = j < left_top ? left[j].value() : apex;
    for (std::size_t i = left[j].begin; i < left[j].end; ++i) out[i] = v;
  }
  for (std::size_t j = 0; j < right.size(); ++j) {
    const double v = j < right_top ? right[j].value() : apex;
    for (std::size_t i = right[j].begin; i < right[j].end; ++i) out[k - 1 - i] = v;
  }
}

}  // namespace detail

OrderedFit isotonic_increasing(std::span<const double> x, std::span<const double> w) {
  validate(x, w);
  std::vector<double> values(x.size());
  detail::isotonic_increasing_into(x, w, values);
  return finish(x, w, std::move(values));
}

OrderedFit isotonic_decreasing(std::span<const double> x, std::span<const double> w) {
  validate(x, w);
  std::vector<double> rx(x.rbegin(), x.rend());
  std::vector<double> rw(w.rbegin(), w.rend());
  std::vector<double> values(x.size());
  detail::isotonic_increasing_into(rx, rw, values);
  std::reverse(values.begin(), values.end());
  return finish(x, w, std::move(values));
}

OrderedFit unimodal_fixed_mode(std::span<const double> x, std::span<const double> w,
                               std::size_t mode) {
  validate(x, w);
  if (mode >= x.size()) throw std::domain_error("mode out of range");
  std::vector<double> values(x.size());
  detail::unimodal_fixed_mode_into(x, w, mode, values);
  return finish(x, w, std::move(values));
}

OrderedFit unimodal_bounded(std::span<const double> x, std::span<const double> w,
                            std::size_t mode, double bound) {
  validate(x, w);
  if (mode >= x.size()) throw std::domain_error("mode out of range");
  std::vector<double> values(x.size());
  detail::unimodal_fixed_mode_into(x, w, mode, values);
  for (double& v : values) v = std::min(v, bound);
  return finish(x, w, std::move(values));
}

OrderedFit isotonic_bounded_split(std::span<const double> x, std::span<const double> w,
                                  std::size_t left_size, double bound) {
  validate(x, w);
  if (left_size > x.size()) throw std::domain_error("split index out of range");
  std::vector<double> values(x.size());
  std::span<double> out(values);
  if (left_size > 0) {
    detail::isotonic_increasing_into(x.first(left_size), w.first(left_size),
                                     out.first(left_size));
    for (double& v : out.first(left_size)) v = std::min(v, bound);
  }
  if (left_size < x.size()) {
    const std::size_t n = x.size() - left_size;
    detail::isotonic_increasing_into(x.last(n), w.last(n), out.last(n));
    for (double& v : out.last(n)) v = std::max(v, bound);
  }
  return finish(x, w, std::move(values));
}

}  // namespace tbandit
