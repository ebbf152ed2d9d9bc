#pragma once

#include <cstdint>
#include <vector>

#include "chshlab/common.hpp"

namespace chshlab {

// ---------------------------------------------------------------------------
// Closed-form outcome statistics of b over Haar-random two-qubit states.
// ---------------------------------------------------------------------------

// Density of b: (3/64) (8 sqrt2 + |x| (sqrt2 |x| - 8)) on |x| <= 2 sqrt2,
// zero outside.  Normalized, even, variance 4/5.
double pdf_b0_haar(double x);

// P(|b| > 2) = (10 - 7 sqrt2)/4 ~ 0.0251263.
double pviol_exact();

// min(1, variance / (threshold - |mean|)^2).  Requires variance >= 0 and
// threshold > |mean|.
double chebyshev_bound(double mean, double variance, double threshold);

// ---------------------------------------------------------------------------
// Streaming estimators.  Accumulators are mergeable monoids over integer
// counts, so results are invariant under any reordering or partitioning of
// the sample stream.
// ---------------------------------------------------------------------------

// Per-bin conditional violation estimate P(|b| > 2 | y in bin).
struct BinnedConditional {
  std::vector<double> bin_edges;           // bins + 1 ascending edges
  std::vector<std::uint64_t> counts;       // samples per bin
  std::vector<std::uint64_t> viol_counts;  // violating samples per bin
  std::vector<double> p_viol;              // NaN where the bin is empty
  std::vector<double> stderr_p;            // binomial; NaN where empty
  std::vector<double> p_y;                 // marginal: counts / total in range
  std::uint64_t total = 0;                 // in-range samples
  std::uint64_t out_of_range = 0;
};

class ConditionalAccumulator {
 public:
  // bins >= 2 equal-width bins over [y_lo, y_hi]; y == y_hi lands in the
  // last bin, y outside the range is tallied separately.
  ConditionalAccumulator(int bins, double y_lo, double y_hi);

  void add(double b, double y);
  void merge(const ConditionalAccumulator& other);
  BinnedConditional finish() const;

 private:
  int bins_;
  double y_lo_, y_hi_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> viol_;
  std::uint64_t out_of_range_ = 0;
};

// 2D histogram over (|b|, y) with exact per-column max |b|.
struct JointHistogram {
  int bins_b = 0;
  int bins_y = 0;
  double b_lo = 0.0, b_hi = 0.0;  // [0, 2 sqrt2]
  double y_lo = 0.0, y_hi = 0.0;
  std::vector<std::uint64_t> counts;      // bins_b x bins_y, row-major in b
  std::vector<std::uint64_t> b_marginal;  // row sums
  std::vector<std::uint64_t> y_marginal;  // column sums
  std::vector<double> col_max_abs_b;      // exact max |b| per y column; -1 if empty
  std::uint64_t total = 0;                // in-range samples
  std::uint64_t out_of_range = 0;

  std::uint64_t at(int ib, int iy) const {
    return counts[static_cast<std::size_t>(ib) * static_cast<std::size_t>(bins_y) +
                  static_cast<std::size_t>(iy)];
  }
};

class JointAccumulator {
 public:
  JointAccumulator(int bins_b, int bins_y, double y_lo, double y_hi);

  void add(double b, double y);  // bins |b| over [0, 2 sqrt2]
  void merge(const JointAccumulator& other);
  JointHistogram finish() const;

 private:
  int bins_b_, bins_y_;
  double y_lo_, y_hi_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> col_max_;
  std::uint64_t out_of_range_ = 0;
};

// Default binning: 50 conditional bins, 200 x 50 joint bins; the fine
// origin study of the local-magic conditional uses 20 bins over [0, 0.05].
inline constexpr int kDefaultConditionalBins = 50;
inline constexpr int kDefaultJointBinsB = 200;
inline constexpr int kDefaultJointBinsY = 50;
inline constexpr int kLocalMagicOriginBins = 20;
inline constexpr double kLocalMagicOriginHi = 0.05;

}  // namespace chshlab
