#include "elastika/cost_kernels.hpp"

#include <atomic>
#include <cmath>

namespace elastika::kernels {

namespace {

// --- --- --- Scalar reference kernels.
//
// These are the semantics every vector backend must reproduce. Sqrt, Abs and
// Square are exactly rounded in both scalar and vector forms, so equivalence
// there is bit-for-bit, not approximate.

void row_sqrt(double a, const double* b, double* out, std::size_t n, double) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::sqrt(std::abs(a - b[k])); }
}

void row_abs(double a, const double* b, double* out, std::size_t n, double) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::abs(a - b[k]); }
}

void row_square(double a, const double* b, double* out, std::size_t n, double) {
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a - b[k];
    out[k] = d * d;
  }
}

void row_pow(double a, const double* b, double* out, std::size_t n, double gamma) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::pow(std::abs(a - b[k]), gamma); }
}

void pair_sqrt(const double* a, const double* b, double* out, std::size_t n, double) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::sqrt(std::abs(a[k] - b[k])); }
}

void pair_abs(const double* a, const double* b, double* out, std::size_t n, double) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::abs(a[k] - b[k]); }
}

void pair_square(const double* a, const double* b, double* out, std::size_t n, double) {
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    out[k] = d * d;
  }
}

void pair_pow(const double* a, const double* b, double* out, std::size_t n, double gamma) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::pow(std::abs(a[k] - b[k]), gamma); }
}

const Backend kScalar{
    "scalar",
    {row_sqrt, row_abs, row_square, row_pow},
    {pair_sqrt, pair_abs, pair_square, pair_pow},
};

const Backend* detect_default() {
  if (const Backend* avx2 = avx2_backend()) { return avx2; }
  return &kScalar;
}

std::atomic<const Backend*> g_active{nullptr};

} // namespace

const Backend& scalar_backend() { return kScalar; }

#if defined(ELASTIKA_HAVE_AVX2_TU)
// Defined in the translation unit compiled with AVX2 codegen enabled. This
// TU stays free of AVX2 instructions so the cpu check below is always safe.
const Backend& avx2_backend_table();

const Backend* avx2_backend() {
  static const Backend* const result =
      __builtin_cpu_supports("avx2") ? &avx2_backend_table() : nullptr;
  return result;
}
#else
const Backend* avx2_backend() { return nullptr; }
#endif

const Backend& active_backend() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (b == nullptr) {
    b = detect_default();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

void force_backend(const std::string& name) {
  if (name == "scalar") {
    g_active.store(&kScalar, std::memory_order_release);
    return;
  }
  if (name == "avx2") {
    if (const Backend* avx2 = avx2_backend()) {
      g_active.store(avx2, std::memory_order_release);
      return;
    }
    throw UsageError("avx2 backend is not available on this machine");
  }
  throw UsageError("unknown kernel backend '" + name + "'");
}

std::vector<std::string> available_backends() {
  std::vector<std::string> names{"scalar"};
  if (avx2_backend() != nullptr) { names.emplace_back("avx2"); }
  return names;
}

} // namespace elastika::kernels
