#include "chshlab/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chshlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Bin index over [lo, hi] with the top edge folded into the last bin;
// -1 when out of range.
int bin_index(double y, double lo, double hi, int bins) {
  if (!(y >= lo && y <= hi)) return -1;
  if (y == hi) return bins - 1;
  const int i = static_cast<int>((y - lo) / (hi - lo) * bins);
  return std::min(i, bins - 1);
}

}  // namespace

double pdf_b0_haar(double x) {
  const double a = std::abs(x);
  if (a > kTsirelson) return 0.0;
  return 3.0 / 64.0 * (8.0 * kSqrt2 + a * (kSqrt2 * a - 8.0));
}

double pviol_exact() { return (10.0 - 7.0 * kSqrt2) / 4.0; }

double chebyshev_bound(double mean, double variance, double threshold) {
  if (variance < 0.0) throw std::invalid_argument("negative variance");
  if (threshold <= std::abs(mean)) {
    throw std::invalid_argument("threshold must exceed |mean|");
  }
  const double gap = threshold - std::abs(mean);
  return std::min(1.0, variance / (gap * gap));
}

ConditionalAccumulator::ConditionalAccumulator(int bins, double y_lo,
                                               double y_hi)
    : bins_(bins), y_lo_(y_lo), y_hi_(y_hi) {
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  if (!(y_hi > y_lo)) throw std::invalid_argument("empty bin range");
  counts_.assign(static_cast<std::size_t>(bins), 0);
  viol_.assign(static_cast<std::size_t>(bins), 0);
}

void ConditionalAccumulator::add(double b, double y) {
  const int i = bin_index(y, y_lo_, y_hi_, bins_);
  if (i < 0) {
    ++out_of_range_;
    return;
  }
  ++counts_[static_cast<std::size_t>(i)];
  if (std::abs(b) > 2.0) ++viol_[static_cast<std::size_t>(i)];
}

void ConditionalAccumulator::merge(const ConditionalAccumulator& other) {
  if (other.bins_ != bins_ || other.y_lo_ != y_lo_ || other.y_hi_ != y_hi_) {
    throw std::invalid_argument("accumulator layouts differ");
  }
  for (int i = 0; i < bins_; ++i) {
    counts_[static_cast<std::size_t>(i)] += other.counts_[static_cast<std::size_t>(i)];
    viol_[static_cast<std::size_t>(i)] += other.viol_[static_cast<std::size_t>(i)];
  }
  out_of_range_ += other.out_of_range_;
}

BinnedConditional ConditionalAccumulator::finish() const {
  BinnedConditional out;
  out.bin_edges.resize(static_cast<std::size_t>(bins_) + 1);
  for (int i = 0; i <= bins_; ++i) {
    out.bin_edges[static_cast<std::size_t>(i)] =
        y_lo_ + (y_hi_ - y_lo_) * static_cast<double>(i) / bins_;
  }
  out.counts = counts_;
  out.viol_counts = viol_;
  out.out_of_range = out_of_range_;
  out.total = 0;
  for (auto c : counts_) out.total += c;
  out.p_viol.assign(static_cast<std::size_t>(bins_), kNaN);
  out.stderr_p.assign(static_cast<std::size_t>(bins_), kNaN);
  out.p_y.assign(static_cast<std::size_t>(bins_), 0.0);
  for (int i = 0; i < bins_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (counts_[k] == 0) continue;  // empty bin: missing, not zero
    const double n = static_cast<double>(counts_[k]);
    const double p = static_cast<double>(viol_[k]) / n;
    out.p_viol[k] = p;
    out.stderr_p[k] = std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
    if (out.total > 0) out.p_y[k] = n / static_cast<double>(out.total);
  }
  return out;
}

JointAccumulator::JointAccumulator(int bins_b, int bins_y, double y_lo,
                                   double y_hi)
    : bins_b_(bins_b), bins_y_(bins_y), y_lo_(y_lo), y_hi_(y_hi) {
  if (bins_b < 2 || bins_y < 2) throw std::invalid_argument("need >= 2 bins");
  if (!(y_hi > y_lo)) throw std::invalid_argument("empty bin range");
  counts_.assign(static_cast<std::size_t>(bins_b) * static_cast<std::size_t>(bins_y), 0);
  col_max_.assign(static_cast<std::size_t>(bins_y), -1.0);
}

void JointAccumulator::add(double b, double y) {
  const double a = std::abs(b);
  const int ib = bin_index(a, 0.0, kTsirelson, bins_b_);
  const int iy = bin_index(y, y_lo_, y_hi_, bins_y_);
  if (ib < 0 || iy < 0) {
    ++out_of_range_;
    return;
  }
  ++counts_[static_cast<std::size_t>(ib) * static_cast<std::size_t>(bins_y_) +
            static_cast<std::size_t>(iy)];
  col_max_[static_cast<std::size_t>(iy)] =
      std::max(col_max_[static_cast<std::size_t>(iy)], a);
}

void JointAccumulator::merge(const JointAccumulator& other) {
  if (other.bins_b_ != bins_b_ || other.bins_y_ != bins_y_ ||
      other.y_lo_ != y_lo_ || other.y_hi_ != y_hi_) {
    throw std::invalid_argument("accumulator layouts differ");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  for (std::size_t i = 0; i < col_max_.size(); ++i) {
    col_max_[i] = std::max(col_max_[i], other.col_max_[i]);
  }
  out_of_range_ += other.out_of_range_;
}

JointHistogram JointAccumulator::finish() const {
  JointHistogram h;
  h.bins_b = bins_b_;
  h.bins_y = bins_y_;
  h.b_lo = 0.0;
  h.b_hi = kTsirelson;
  h.y_lo = y_lo_;
  h.y_hi = y_hi_;
  h.counts = counts_;
  h.col_max_abs_b = col_max_;
  h.out_of_range = out_of_range_;
  h.b_marginal.assign(static_cast<std::size_t>(bins_b_), 0);
  h.y_marginal.assign(static_cast<std::size_t>(bins_y_), 0);
  h.total = 0;
  for (int ib = 0; ib < bins_b_; ++ib) {
    for (int iy = 0; iy < bins_y_; ++iy) {
      const std::uint64_t c = h.at(ib, iy);
      h.b_marginal[static_cast<std::size_t>(ib)] += c;
      h.y_marginal[static_cast<std::size_t>(iy)] += c;
      h.total += c;
    }
  }
  return h;
}

}  // namespace chshlab
