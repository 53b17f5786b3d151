#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "elastika/cost.hpp"

namespace elastika {

/// Sakoe-Chiba band half-width. Bounded windows are meaningful in
/// [0, L-2]; anything wider behaves exactly like an unlimited window, so
/// effective() clamps there.
class WarpingWindow {
public:
  WarpingWindow() = default;

  [[nodiscard]] static WarpingWindow unlimited() { return WarpingWindow(); }
  [[nodiscard]] static WarpingWindow bounded(std::size_t w) {
    WarpingWindow win;
    win.unlimited_ = false;
    win.w_ = w;
    return win;
  }

  [[nodiscard]] bool is_unlimited() const { return unlimited_; }

  /// The raw bound; only meaningful when bounded.
  [[nodiscard]] std::size_t bound() const { return w_; }

  /// Band half-width actually used on series of length `len`.
  [[nodiscard]] std::size_t effective(std::size_t len) const {
    const std::size_t widest = len >= 2 ? len - 2 : 0;
    if (unlimited_) { return widest; }
    return w_ < widest ? w_ : widest;
  }

  bool operator==(const WarpingWindow&) const = default;

private:
  bool unlimited_ = true;
  std::size_t w_ = 0;
};

/// A distance value plus, when requested, the optimal alignment it came
/// from. Path pairs are 0-based, start at (0,0), end at (L-1,L-1), and each
/// successor increments i, j, or both.
struct AlignmentResult {
  double value = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// Banded DTW. `cells`, when given, accumulates the number of matrix cells
/// evaluated (at most (2w+1)·L).
[[nodiscard]] double dtw(const std::vector<double>& a, const std::vector<double>& b,
                         WarpingWindow window, const CostExponent& gamma,
                         std::uint64_t* cells = nullptr);

/// DTW with path recovery (full matrix; ties prefer diagonal, then the
/// cell above, then the cell to the left).
[[nodiscard]] AlignmentResult dtw_path(const std::vector<double>& a, const std::vector<double>& b,
                                       WarpingWindow window, const CostExponent& gamma);

/// Amerced DTW: unbanded, each non-diagonal step pays an extra `omega`.
[[nodiscard]] double adtw(const std::vector<double>& a, const std::vector<double>& b, double omega,
                          const CostExponent& gamma);

[[nodiscard]] AlignmentResult adtw_path(const std::vector<double>& a, const std::vector<double>& b,
                                        double omega, const CostExponent& gamma);

/// Sum of pointwise costs along the diagonal; the no-warping distance.
[[nodiscard]] double direct_alignment(const std::vector<double>& a, const std::vector<double>& b,
                                      const CostExponent& gamma);

/// Weighted DTW: unbanded, aligned-pair cost scaled by the logistic weight
/// 1 / (1 + exp(-g * (|i-j| - L/2))).
[[nodiscard]] double wdtw(const std::vector<double>& a, const std::vector<double>& b, double g,
                          const CostExponent& gamma);

/// Longest-common-subsequence distance: pairs match when |a_i - b_j| <=
/// epsilon inside the band; returns 1 - match_len / L.
[[nodiscard]] double lcss(const std::vector<double>& a, const std::vector<double>& b,
                          double epsilon, WarpingWindow window);

/// Edit distance with real penalty: gaps align against `gap_value` at cost
/// |x - gap_value|, matches cost |a_i - b_j|, banded.
[[nodiscard]] double erp(const std::vector<double>& a, const std::vector<double>& b,
                         double gap_value, WarpingWindow window);

/// Move-split-merge distance with split/merge cost c.
[[nodiscard]] double msm(const std::vector<double>& a, const std::vector<double>& b, double c);

/// Time-warp edit distance with stiffness nu and gap penalty lambda.
[[nodiscard]] double twe(const std::vector<double>& a, const std::vector<double>& b, double nu,
                         double lambda);

/// Derivative composites: the distance applied to first derivatives.
[[nodiscard]] double ddtw(const std::vector<double>& a, const std::vector<double>& b,
                          WarpingWindow window, const CostExponent& gamma);
[[nodiscard]] double dwdtw(const std::vector<double>& a, const std::vector<double>& b, double g,
                           const CostExponent& gamma);

} // namespace elastika
