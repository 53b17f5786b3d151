#pragma once

#include <string>
#include <vector>

#include "elastika/common.hpp"

namespace elastika {

/// Specialized evaluation routes for the pointwise cost |a-b|^gamma.
/// The general std::pow route is substantially slower than the three
/// special cases, so kernels dispatch on this tag.
enum class FastPath { Sqrt, Abs, Square, GeneralPow };

[[nodiscard]] constexpr FastPath classify_exponent(double gamma) {
  if (gamma == 0.5) { return FastPath::Sqrt; }
  if (gamma == 1.0) { return FastPath::Abs; }
  if (gamma == 2.0) { return FastPath::Square; }
  return FastPath::GeneralPow;
}

[[nodiscard]] const char* fast_path_name(FastPath fp);

/// A validated cost-function exponent: gamma > 0, finite.
struct CostExponent {
  double gamma;
  FastPath fast_path;

  explicit CostExponent(double g);

  friend bool operator==(const CostExponent& a, const CostExponent& b) {
    return a.gamma == b.gamma;
  }
};

/// Pointwise cost |a - b|^gamma. Validates that both inputs are finite.
[[nodiscard]] double cost(double a, double b, const CostExponent& gamma);

/// Same, without input validation; used by kernels over validated series.
[[nodiscard]] inline double cost_unchecked(double a, double b, const CostExponent& gamma) {
  const double d = std::abs(a - b);
  switch (gamma.fast_path) {
    case FastPath::Sqrt: return std::sqrt(d);
    case FastPath::Abs: return d;
    case FastPath::Square: return d * d;
    case FastPath::GeneralPow: return std::pow(d, gamma.gamma);
  }
  return 0.0; // unreachable
}

enum class ExponentSetName { A, B, C, Custom };

[[nodiscard]] const char* exponent_set_label(ExponentSetName name);

/// Named exponent grid. The reciprocal members are stored as evaluated
/// double-precision quotients (1.0/1.5, ...); membership checks elsewhere
/// compare those stored values, never re-derivations.
struct ExponentSet {
  ExponentSetName name;
  std::vector<CostExponent> exponents;

  /// name must be one of "a", "b", "c" (case-insensitive). Throws UsageError otherwise.
  static ExponentSet named(const std::string& name);
  static ExponentSet named(ExponentSetName name);

  /// Single-exponent set used for fixed-gamma training.
  static ExponentSet single(double gamma);

  /// Arbitrary strictly-increasing positive grid.
  static ExponentSet custom(const std::vector<double>& gammas);

  [[nodiscard]] std::size_t size() const noexcept { return exponents.size(); }
};

} // namespace elastika
