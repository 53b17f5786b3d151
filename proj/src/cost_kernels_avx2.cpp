// AVX2 implementations of the pointwise cost kernels. Compiled with AVX2
// codegen enabled; callers must check cpu support before touching the table.
//
// Sqrt, Abs and Square use exactly-rounded vector instructions, so results
// are bit-identical to the scalar reference. GeneralPow has no exact vector
// counterpart and delegates to scalar std::pow.

#include "elastika/cost_kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace elastika::kernels {

namespace {

const __m256d kSignMask = _mm256_set1_pd(-0.0);

void row_sqrt(double a, const double* b, double* out, std::size_t n, double) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(va, _mm256_loadu_pd(b + k));
    const __m256d ad = _mm256_andnot_pd(kSignMask, d);
    _mm256_storeu_pd(out + k, _mm256_sqrt_pd(ad));
  }
  for (; k < n; ++k) { out[k] = std::sqrt(std::abs(a - b[k])); }
}

void row_abs(double a, const double* b, double* out, std::size_t n, double) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(va, _mm256_loadu_pd(b + k));
    _mm256_storeu_pd(out + k, _mm256_andnot_pd(kSignMask, d));
  }
  for (; k < n; ++k) { out[k] = std::abs(a - b[k]); }
}

void row_square(double a, const double* b, double* out, std::size_t n, double) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(va, _mm256_loadu_pd(b + k));
    _mm256_storeu_pd(out + k, _mm256_mul_pd(d, d));
  }
  for (; k < n; ++k) {
    const double d = a - b[k];
    out[k] = d * d;
  }
}

void row_pow(double a, const double* b, double* out, std::size_t n, double gamma) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::pow(std::abs(a - b[k]), gamma); }
}

void pair_sqrt(const double* a, const double* b, double* out, std::size_t n, double) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    const __m256d ad = _mm256_andnot_pd(kSignMask, d);
    _mm256_storeu_pd(out + k, _mm256_sqrt_pd(ad));
  }
  for (; k < n; ++k) { out[k] = std::sqrt(std::abs(a[k] - b[k])); }
}

void pair_abs(const double* a, const double* b, double* out, std::size_t n, double) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    _mm256_storeu_pd(out + k, _mm256_andnot_pd(kSignMask, d));
  }
  for (; k < n; ++k) { out[k] = std::abs(a[k] - b[k]); }
}

void pair_square(const double* a, const double* b, double* out, std::size_t n, double) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    _mm256_storeu_pd(out + k, _mm256_mul_pd(d, d));
  }
  for (; k < n; ++k) {
    const double d = a[k] - b[k];
    out[k] = d * d;
  }
}

void pair_pow(const double* a, const double* b, double* out, std::size_t n, double gamma) {
  for (std::size_t k = 0; k < n; ++k) { out[k] = std::pow(std::abs(a[k] - b[k]), gamma); }
}

const Backend kAvx2{
    "avx2",
    {row_sqrt, row_abs, row_square, row_pow},
    {pair_sqrt, pair_abs, pair_square, pair_pow},
};

} // namespace

const Backend& avx2_backend_table() { return kAvx2; }

} // namespace elastika::kernels
