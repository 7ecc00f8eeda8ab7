#include "wmp/kernels.hpp"

#include <algorithm>

namespace wmp::kernels {
namespace {

// Complex products are spelled out so the reference path does not go
// through the C99 Annex G NaN recovery in std::complex::operator*.
inline void mul_add(Complex a, Complex b, Complex& acc) {
  const double re = a.real() * b.real() - a.imag() * b.imag();
  const double im = a.real() * b.imag() + a.imag() * b.real();
  acc = Complex(acc.real() + re, acc.imag() + im);
}

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
                 Complex* c) {
  std::fill(c, c + m * n, Complex{});
  for (std::size_t i = 0; i < m; ++i) {
    Complex* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const Complex aip = a[i * k + p];
      if (aip == Complex{}) continue;
      const Complex* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) mul_add(aip, brow[j], crow[j]);
    }
  }
}

void axpy_scalar(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) mul_add(alpha, x[i], y[i]);
}

double sum_abs2_scalar(std::size_t n, const Complex* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{Isa::Scalar, &gemm_scalar, &axpy_scalar, &sum_abs2_scalar};
  return table;
}

}  // namespace wmp::kernels
