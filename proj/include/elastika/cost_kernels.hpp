#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "elastika/cost.hpp"

namespace elastika::kernels {

/// out[k] = |a - b[k]|^gamma for k in [0, n). `gamma` is only read on the
/// GeneralPow route; the three fast paths ignore it.
using RowFn = void (*)(double a, const double* b, double* out, std::size_t n, double gamma);

/// out[k] = |a[k] - b[k]|^gamma for k in [0, n).
using PairFn = void (*)(const double* a, const double* b, double* out, std::size_t n, double gamma);

/// One implementation of the pointwise-cost kernels. `row` and `pair` are
/// indexed by FastPath. Vector backends must produce bit-identical outputs
/// to the scalar reference on the Sqrt/Abs/Square routes (all three are
/// exactly rounded operations); GeneralPow always runs the scalar loop.
struct Backend {
  const char* name;
  RowFn row[4];
  PairFn pair[4];
};

[[nodiscard]] const Backend& scalar_backend();

/// AVX2 implementation, or nullptr when not compiled in or not supported by
/// the running CPU.
[[nodiscard]] const Backend* avx2_backend();

/// The backend used by the distance kernels. Defaults to the widest
/// available vector backend; override with force_backend.
[[nodiscard]] const Backend& active_backend();

/// Selects a backend by name ("scalar", "avx2"). Throws UsageError when the
/// name is unknown or the backend is unavailable on this machine.
void force_backend(const std::string& name);

[[nodiscard]] std::vector<std::string> available_backends();

inline void cost_row(double a, const double* b, double* out, std::size_t n, const CostExponent& g) {
  active_backend().row[static_cast<int>(g.fast_path)](a, b, out, n, g.gamma);
}

inline void cost_pairwise(const double* a, const double* b, double* out, std::size_t n,
                          const CostExponent& g) {
  active_backend().pair[static_cast<int>(g.fast_path)](a, b, out, n, g.gamma);
}

} // namespace elastika::kernels
