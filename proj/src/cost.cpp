#include "elastika/cost.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace elastika {

const char* fast_path_name(FastPath fp) {
  switch (fp) {
    case FastPath::Sqrt: return "sqrt";
    case FastPath::Abs: return "abs";
    case FastPath::Square: return "square";
    case FastPath::GeneralPow: return "pow";
  }
  return "?";
}

CostExponent::CostExponent(double g) : gamma(g), fast_path(classify_exponent(g)) {
  if (!std::isfinite(g) || g <= 0.0) {
    throw UsageError("cost exponent must be a finite positive real, got " + std::to_string(g));
  }
}

double cost(double a, double b, const CostExponent& gamma) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::domain_error("cost: non-finite input");
  }
  return cost_unchecked(a, b, gamma);
}

const char* exponent_set_label(ExponentSetName name) {
  switch (name) {
    case ExponentSetName::A: return "a";
    case ExponentSetName::B: return "b";
    case ExponentSetName::C: return "c";
    case ExponentSetName::Custom: return "custom";
  }
  return "?";
}

namespace {

ExponentSet make_set(ExponentSetName name, const std::vector<double>& gammas) {
  ExponentSet set{name, {}};
  set.exponents.reserve(gammas.size());
  double prev = 0.0;
  for (double g : gammas) {
    if (g <= prev) { throw UsageError("exponent set values must be strictly increasing and positive"); }
    set.exponents.emplace_back(g);
    prev = g;
  }
  if (set.exponents.empty()) { throw UsageError("exponent set must not be empty"); }
  return set;
}

} // namespace

ExponentSet ExponentSet::named(ExponentSetName name) {
  switch (name) {
    case ExponentSetName::A:
      return make_set(name, {0.5, 1.0 / 1.5, 1.0, 1.5, 2.0});
    case ExponentSetName::B:
      return make_set(name, {1.0 / 5.0, 1.0 / 4.0, 1.0 / 3.0, 0.5, 1.0 / 1.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0});
    case ExponentSetName::C:
      return make_set(name, {0.5, 1.0 / 1.75, 1.0 / 1.5, 1.0 / 1.25, 1.0, 1.25, 1.5, 1.75, 2.0});
    case ExponentSetName::Custom:
      break;
  }
  throw UsageError("no named grid for 'custom'");
}

ExponentSet ExponentSet::named(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "a") { return named(ExponentSetName::A); }
  if (lower == "b") { return named(ExponentSetName::B); }
  if (lower == "c") { return named(ExponentSetName::C); }
  throw UsageError("unknown exponent set '" + name + "' (expected a, b or c)");
}

ExponentSet ExponentSet::single(double gamma) {
  return make_set(ExponentSetName::Custom, {gamma});
}

ExponentSet ExponentSet::custom(const std::vector<double>& gammas) {
  return make_set(ExponentSetName::Custom, gammas);
}

} // namespace elastika
