#include <cstdlib>
#include <string_view>

#include "wmp/kernels.hpp"

namespace wmp::kernels {

#ifdef WMP_HAVE_AVX2
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#if defined(WMP_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("WMP_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar();
    if (const KernelTable* t = avx2()) return *t;
    return scalar();
  }();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace wmp::kernels
