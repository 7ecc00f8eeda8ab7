// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "wmp/kernels.hpp"

namespace wmp::kernels {
namespace {

// One __m256d holds two interleaved complex doubles (re0, im0, re1, im1).
// a * b = fmaddsub(ar, b, ai * swap(b)) with swap exchanging re/im lanes.
inline __m256d cmul(__m256d ar, __m256d ai, __m256d b) {
  const __m256d bswap = _mm256_permute_pd(b, 0b0101);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bswap));
}

inline void mul_add_tail(Complex a, Complex b, Complex& acc) {
  const double re = a.real() * b.real() - a.imag() * b.imag();
  const double im = a.real() * b.imag() + a.imag() * b.real();
  acc = Complex(acc.real() + re, acc.imag() + im);
}

void row_axpy(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d x0 = _mm256_loadu_pd(xd + 2 * j);
    const __m256d x1 = _mm256_loadu_pd(xd + 2 * j + 4);
    __m256d y0 = _mm256_loadu_pd(yd + 2 * j);
    __m256d y1 = _mm256_loadu_pd(yd + 2 * j + 4);
    y0 = _mm256_add_pd(y0, cmul(ar, ai, x0));
    y1 = _mm256_add_pd(y1, cmul(ar, ai, x1));
    _mm256_storeu_pd(yd + 2 * j, y0);
    _mm256_storeu_pd(yd + 2 * j + 4, y1);
  }
  for (; j + 2 <= n; j += 2) {
    const __m256d x0 = _mm256_loadu_pd(xd + 2 * j);
    __m256d y0 = _mm256_loadu_pd(yd + 2 * j);
    y0 = _mm256_add_pd(y0, cmul(ar, ai, x0));
    _mm256_storeu_pd(yd + 2 * j, y0);
  }
  for (; j < n; ++j) mul_add_tail(alpha, x[j], y[j]);
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
               Complex* c) {
  std::fill(c, c + m * n, Complex{});
  for (std::size_t i = 0; i < m; ++i) {
    Complex* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const Complex aip = a[i * k + p];
      if (aip == Complex{}) continue;
      row_axpy(n, aip, b + p * n, crow);
    }
  }
}

double sum_abs2_avx2(std::size_t n, const Complex* x) {
  auto* xd = reinterpret_cast<const double*>(x);
  const std::size_t len = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(xd + i);
    const __m256d v1 = _mm256_loadu_pd(xd + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < len; ++i) s += xd[i] * xd[i];
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::Avx2, &gemm_avx2, &row_axpy, &sum_abs2_avx2};
  return table;
}

}  // namespace wmp::kernels
