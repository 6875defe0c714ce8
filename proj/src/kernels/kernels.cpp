#include "mfg/kernels/kernels.hpp"

namespace mfg::kernels {

#if defined(__x86_64__) || defined(__i386__)
const Ops& avx2_ops();  // defined in kernels_avx2.cpp

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops& ops() {
  static const Ops& selected = cpu_has_avx2() ? avx2_ops() : scalar_ops();
  return selected;
}
#else
bool cpu_has_avx2() { return false; }

const Ops& ops() { return scalar_ops(); }
#endif

}  // namespace mfg::kernels
