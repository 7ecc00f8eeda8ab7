#pragma once

#include <cstddef>
#include <string_view>

#include "wmp/matrix.hpp"

// Inner loops behind Matrix arithmetic. Each instruction-set variant fills a
// KernelTable; the active table is chosen once at first use from the CPU's
// reported features. WMP_KERNELS=scalar in the environment forces the
// portable path.

namespace wmp::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  /// c[m x n] = a[m x k] * b[k x n], all row-major and densely packed.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
               Complex* c);
  /// y += alpha * x
  void (*axpy)(std::size_t n, Complex alpha, const Complex* x, Complex* y);
  /// sum |x_i|^2
  double (*sum_abs2)(std::size_t n, const Complex* x);
};

const KernelTable& scalar();
/// nullptr when the AVX2 translation unit was not built or the CPU lacks
/// AVX2/FMA.
const KernelTable* avx2();

const KernelTable& active();
std::string_view isa_name(Isa isa);

}  // namespace wmp::kernels
