#include "elastika/distances.hpp"

#include <algorithm>
#include <cmath>

#include "elastika/common.hpp"
#include "elastika/cost_kernels.hpp"
#include "elastika/series.hpp"

namespace elastika {

namespace {

void require_pair(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatchError("series lengths differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
  }
  if (a.empty()) { throw UsageError("series must hold at least one value"); }
}

void require_param(bool ok, const char* msg) {
  if (!ok) { throw UsageError(msg); }
}

double min3(double x, double y, double z) { return std::min(x, std::min(y, z)); }

/// Band half-width for the edit-family kernels, where the full matrix
/// (corner cells included) is the unlimited semantics.
std::size_t edit_band(const WarpingWindow& window, std::size_t len) {
  const std::size_t full = len - 1;
  if (window.is_unlimited()) { return full; }
  return std::min(window.bound(), full);
}

double msm_step(double x, double y, double z, double c) {
  if ((y <= x && x <= z) || (z <= x && x <= y)) { return c; }
  return c + std::min(std::abs(x - y), std::abs(x - z));
}

} // namespace

double dtw(const std::vector<double>& a, const std::vector<double>& b, WarpingWindow window,
           const CostExponent& gamma, std::uint64_t* cells) {
  require_pair(a, b);
  const std::size_t len = a.size();
  const std::size_t w = window.effective(len);

  // Rolling rows over columns [0, len]; column 0 is the +inf border.
  std::vector<double> prev(len + 1, kPositiveInfinity);
  std::vector<double> cur(len + 1, kPositiveInfinity);
  std::vector<double> costs(len);
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= len; ++i) {
    const std::size_t jlo = i > w ? i - w : 1;
    const std::size_t jhi = std::min(len, i + w);
    // Guard the cells this row reads but does not write against stale
    // values left from row i-2.
    cur[0] = kPositiveInfinity;
    if (jlo > 1) { cur[jlo - 1] = kPositiveInfinity; }
    kernels::cost_row(a[i - 1], b.data() + (jlo - 1), costs.data(), jhi - jlo + 1, gamma);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      cur[j] = costs[j - jlo] + min3(prev[j - 1], prev[j], cur[j - 1]);
    }
    if (cells != nullptr) { *cells += jhi - jlo + 1; }
    std::swap(prev, cur);
  }
  return prev[len];
}

AlignmentResult dtw_path(const std::vector<double>& a, const std::vector<double>& b,
                         WarpingWindow window, const CostExponent& gamma) {
  require_pair(a, b);
  const std::size_t len = a.size();
  const std::size_t w = window.effective(len);
  const std::size_t stride = len + 1;

  std::vector<double> m(stride * stride, kPositiveInfinity);
  std::vector<double> costs(len);
  m[0] = 0.0;
  for (std::size_t i = 1; i <= len; ++i) {
    const std::size_t jlo = i > w ? i - w : 1;
    const std::size_t jhi = std::min(len, i + w);
    kernels::cost_row(a[i - 1], b.data() + (jlo - 1), costs.data(), jhi - jlo + 1, gamma);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      m[i * stride + j] = costs[j - jlo] + min3(m[(i - 1) * stride + (j - 1)],
                                                m[(i - 1) * stride + j], m[i * stride + (j - 1)]);
    }
  }

  AlignmentResult out;
  out.value = m[len * stride + len];
  std::size_t i = len;
  std::size_t j = len;
  out.path.emplace_back(i - 1, j - 1);
  while (i != 1 || j != 1) {
    // The scalar cost here is bit-identical to the forward pass's kernel
    // output, so predecessor tests can use exact equality.
    const double c = cost_unchecked(a[i - 1], b[j - 1], gamma);
    const double here = m[i * stride + j];
    if (i > 1 && j > 1 && here == m[(i - 1) * stride + (j - 1)] + c) {
      --i;
      --j;
    } else if (i > 1 && here == m[(i - 1) * stride + j] + c) {
      --i;
    } else if (j > 1 && here == m[i * stride + (j - 1)] + c) {
      --j;
    } else {
      throw InternalError("alignment backtrack lost the optimal path");
    }
    out.path.emplace_back(i - 1, j - 1);
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

double adtw(const std::vector<double>& a, const std::vector<double>& b, double omega,
            const CostExponent& gamma) {
  require_pair(a, b);
  require_param(std::isfinite(omega) && omega >= 0.0, "adtw penalty must be finite and >= 0");
  const std::size_t len = a.size();

  std::vector<double> prev(len + 1, kPositiveInfinity);
  std::vector<double> cur(len + 1, kPositiveInfinity);
  std::vector<double> costs(len);
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= len; ++i) {
    cur[0] = kPositiveInfinity;
    kernels::cost_row(a[i - 1], b.data(), costs.data(), len, gamma);
    for (std::size_t j = 1; j <= len; ++j) {
      const double c = costs[j - 1];
      cur[j] = min3(prev[j - 1] + c, prev[j] + c + omega, cur[j - 1] + c + omega);
    }
    std::swap(prev, cur);
  }
  return prev[len];
}

AlignmentResult adtw_path(const std::vector<double>& a, const std::vector<double>& b, double omega,
                          const CostExponent& gamma) {
  require_pair(a, b);
  require_param(std::isfinite(omega) && omega >= 0.0, "adtw penalty must be finite and >= 0");
  const std::size_t len = a.size();
  const std::size_t stride = len + 1;

  std::vector<double> m(stride * stride, kPositiveInfinity);
  std::vector<double> costs(len);
  m[0] = 0.0;
  for (std::size_t i = 1; i <= len; ++i) {
    kernels::cost_row(a[i - 1], b.data(), costs.data(), len, gamma);
    for (std::size_t j = 1; j <= len; ++j) {
      const double c = costs[j - 1];
      m[i * stride + j] = min3(m[(i - 1) * stride + (j - 1)] + c, m[(i - 1) * stride + j] + c + omega,
                               m[i * stride + (j - 1)] + c + omega);
    }
  }

  AlignmentResult out;
  out.value = m[len * stride + len];
  std::size_t i = len;
  std::size_t j = len;
  out.path.emplace_back(i - 1, j - 1);
  while (i != 1 || j != 1) {
    const double c = cost_unchecked(a[i - 1], b[j - 1], gamma);
    const double here = m[i * stride + j];
    if (i > 1 && j > 1 && here == m[(i - 1) * stride + (j - 1)] + c) {
      --i;
      --j;
    } else if (i > 1 && here == m[(i - 1) * stride + j] + c + omega) {
      --i;
    } else if (j > 1 && here == m[i * stride + (j - 1)] + c + omega) {
      --j;
    } else {
      throw InternalError("alignment backtrack lost the optimal path");
    }
    out.path.emplace_back(i - 1, j - 1);
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

double direct_alignment(const std::vector<double>& a, const std::vector<double>& b,
                        const CostExponent& gamma) {
  require_pair(a, b);
  // Sequential scalar accumulation: matches the DP diagonal chain bit for
  // bit, which the large-penalty collapse tests rely on.
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) { total += cost_unchecked(a[k], b[k], gamma); }
  return total;
}

double wdtw(const std::vector<double>& a, const std::vector<double>& b, double g,
            const CostExponent& gamma) {
  require_pair(a, b);
  require_param(std::isfinite(g) && g >= 0.0, "wdtw g must be finite and >= 0");
  const std::size_t len = a.size();
  const double half = static_cast<double>(len) / 2.0;

  std::vector<double> weights(len);
  for (std::size_t d = 0; d < len; ++d) {
    weights[d] = 1.0 / (1.0 + std::exp(-g * (static_cast<double>(d) - half)));
  }

  std::vector<double> prev(len + 1, kPositiveInfinity);
  std::vector<double> cur(len + 1, kPositiveInfinity);
  std::vector<double> costs(len);
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= len; ++i) {
    cur[0] = kPositiveInfinity;
    kernels::cost_row(a[i - 1], b.data(), costs.data(), len, gamma);
    for (std::size_t j = 1; j <= len; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      cur[j] = weights[d] * costs[j - 1] + min3(prev[j - 1], prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[len];
}

double lcss(const std::vector<double>& a, const std::vector<double>& b, double epsilon,
            WarpingWindow window) {
  require_pair(a, b);
  require_param(std::isfinite(epsilon) && epsilon > 0.0, "lcss epsilon must be finite and > 0");
  const std::size_t len = a.size();
  const std::size_t w = edit_band(window, len);

  // Match-length table; cells outside the band keep the 0 initialization.
  std::vector<std::size_t> prev(len + 1, 0);
  std::vector<std::size_t> cur(len + 1, 0);
  for (std::size_t i = 1; i <= len; ++i) {
    std::fill(cur.begin(), cur.end(), std::size_t{0});
    const std::size_t jlo = i > w ? i - w : 1;
    const std::size_t jhi = std::min(len, i + w);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      if (std::abs(a[i - 1] - b[j - 1]) <= epsilon) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[len]) / static_cast<double>(len);
}

double erp(const std::vector<double>& a, const std::vector<double>& b, double gap_value,
           WarpingWindow window) {
  require_pair(a, b);
  require_param(std::isfinite(gap_value) && gap_value >= 0.0,
                "erp gap value must be finite and >= 0");
  const std::size_t len = a.size();
  const std::size_t w = edit_band(window, len);

  std::vector<double> prev(len + 1, kPositiveInfinity);
  std::vector<double> cur(len + 1, kPositiveInfinity);
  // Row 0: deleting the first j values of b, while the band allows.
  prev[0] = 0.0;
  for (std::size_t j = 1; j <= std::min(len, w); ++j) {
    prev[j] = prev[j - 1] + std::abs(b[j - 1] - gap_value);
  }

  double col0 = 0.0; // running prefix of |a_k - gap|
  for (std::size_t i = 1; i <= len; ++i) {
    col0 += std::abs(a[i - 1] - gap_value);
    cur[0] = i <= w ? col0 : kPositiveInfinity;
    const std::size_t jlo = i > w ? i - w : 1;
    const std::size_t jhi = std::min(len, i + w);
    if (jlo > 1) { cur[jlo - 1] = kPositiveInfinity; }
    const double del_a = std::abs(a[i - 1] - gap_value);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const double match = std::abs(a[i - 1] - b[j - 1]);
      const double del_b = std::abs(b[j - 1] - gap_value);
      cur[j] = min3(prev[j - 1] + match, prev[j] + del_a, cur[j - 1] + del_b);
    }
    std::swap(prev, cur);
  }
  return prev[len];
}

double msm(const std::vector<double>& a, const std::vector<double>& b, double c) {
  require_pair(a, b);
  require_param(std::isfinite(c) && c >= 0.0, "msm cost must be finite and >= 0");
  const std::size_t len = a.size();

  // Rows are 1-based over the values themselves; row 1 is a border.
  std::vector<double> prev(len + 1, 0.0);
  std::vector<double> cur(len + 1, 0.0);
  prev[1] = std::abs(a[0] - b[0]);
  for (std::size_t j = 2; j <= len; ++j) {
    prev[j] = prev[j - 1] + msm_step(b[j - 1], a[0], b[j - 2], c);
  }
  for (std::size_t i = 2; i <= len; ++i) {
    cur[1] = prev[1] + msm_step(a[i - 1], a[i - 2], b[0], c);
    for (std::size_t j = 2; j <= len; ++j) {
      cur[j] = min3(prev[j - 1] + std::abs(a[i - 1] - b[j - 1]),
                    prev[j] + msm_step(a[i - 1], a[i - 2], b[j - 1], c),
                    cur[j - 1] + msm_step(b[j - 1], a[i - 1], b[j - 2], c));
    }
    std::swap(prev, cur);
  }
  return prev[len];
}

double twe(const std::vector<double>& a, const std::vector<double>& b, double nu, double lambda) {
  require_pair(a, b);
  require_param(std::isfinite(nu) && nu >= 0.0, "twe nu must be finite and >= 0");
  require_param(std::isfinite(lambda) && lambda >= 0.0, "twe lambda must be finite and >= 0");
  const std::size_t len = a.size();

  // Series are implicitly prefixed with a zero sample.
  std::vector<double> prev(len + 1, kPositiveInfinity);
  std::vector<double> cur(len + 1, kPositiveInfinity);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= len; ++i) {
    cur[0] = kPositiveInfinity;
    const double ai = a[i - 1];
    const double ai_prev = i >= 2 ? a[i - 2] : 0.0;
    const double del_a = std::abs(ai - ai_prev) + nu + lambda;
    for (std::size_t j = 1; j <= len; ++j) {
      const double bj = b[j - 1];
      const double bj_prev = j >= 2 ? b[j - 2] : 0.0;
      const double gap = i > j ? i - j : j - i;
      const double match = std::abs(ai - bj) + std::abs(ai_prev - bj_prev) + 2.0 * nu * gap;
      const double del_b = std::abs(bj - bj_prev) + nu + lambda;
      cur[j] = min3(prev[j - 1] + match, prev[j] + del_a, cur[j - 1] + del_b);
    }
    std::swap(prev, cur);
  }
  return prev[len];
}

double ddtw(const std::vector<double>& a, const std::vector<double>& b, WarpingWindow window,
            const CostExponent& gamma) {
  return dtw(derivative_values(a), derivative_values(b), window, gamma);
}

double dwdtw(const std::vector<double>& a, const std::vector<double>& b, double g,
             const CostExponent& gamma) {
  return wdtw(derivative_values(a), derivative_values(b), g, gamma);
}

} // namespace elastika
