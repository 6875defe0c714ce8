#pragma once
// Range-reduced Pade approximation of exp(x) for x <= 0 (Cephes exp.c
// coefficients). Both the scalar and the vector lanes implement exactly
// this sequence of operations, so results agree bit-for-bit.

#include <cmath>
#include <cstdint>

namespace mfg::kernels::detail {

inline constexpr double kLog2E = 1.4426950408889634073599;
inline constexpr double kC1 = 6.93145751953125e-1;
inline constexpr double kC2 = 1.42860682030941723212e-6;
inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;
inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;
// exp(x) < smallest normal for x below this; flushed to zero.
inline constexpr double kUnderflow = -708.39641853226408;

inline double exp_nonpos(double x) {
  if (x < kUnderflow) return 0.0;
  const double n = std::nearbyint(x * kLog2E);
  const double r = (x - n * kC1) - n * kC2;
  const double r2 = r * r;
  const double px = r * ((kExpP0 * r2 + kExpP1) * r2 + kExpP2);
  const double qx = ((kExpQ0 * r2 + kExpQ1) * r2 + kExpQ2) * r2 + kExpQ3;
  const double y = 1.0 + 2.0 * (px / (qx - px));
  const std::int64_t biased = static_cast<std::int64_t>(n) + 1023;
  std::uint64_t bits = static_cast<std::uint64_t>(biased) << 52;
  double scale;
  __builtin_memcpy(&scale, &bits, sizeof scale);
  return y * scale;
}

}  // namespace mfg::kernels::detail
