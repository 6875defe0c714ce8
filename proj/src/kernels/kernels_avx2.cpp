// AVX2 lane. Built with -mavx2 -mfma but deliberately uses separate
// mul/add (no fused ops) in the elementwise kernels so the results match
// the scalar reference bit-for-bit.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "mfg/kernels/exp_detail.hpp"
#include "mfg/kernels/kernels.hpp"

namespace mfg::kernels {
namespace {

using detail::exp_nonpos;

inline __m256d exp_nonpos4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(detail::kLog2E);
  const __m256d c1 = _mm256_set1_pd(detail::kC1);
  const __m256d c2 = _mm256_set1_pd(detail::kC2);
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, log2e),
                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, c1));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, c2));
  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d px = _mm256_set1_pd(detail::kExpP0);
  px = _mm256_add_pd(_mm256_mul_pd(px, r2), _mm256_set1_pd(detail::kExpP1));
  px = _mm256_add_pd(_mm256_mul_pd(px, r2), _mm256_set1_pd(detail::kExpP2));
  px = _mm256_mul_pd(r, px);

  __m256d qx = _mm256_set1_pd(detail::kExpQ0);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, r2), _mm256_set1_pd(detail::kExpQ1));
  qx = _mm256_add_pd(_mm256_mul_pd(qx, r2), _mm256_set1_pd(detail::kExpQ2));
  qx = _mm256_add_pd(_mm256_mul_pd(qx, r2), _mm256_set1_pd(detail::kExpQ3));

  const __m256d frac = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  const __m256d y =
      _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(_mm256_set1_pd(2.0), frac));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i biased = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
  __m256d res = _mm256_mul_pd(y, scale);

  const __m256d keep =
      _mm256_cmp_pd(x, _mm256_set1_pd(detail::kUnderflow), _CMP_GE_OQ);
  return _mm256_and_pd(res, keep);
}

void exp_neg_avx2(const double* q, double* out, std::size_t n) {
  std::size_t i = 0;
  const __m256d sign = _mm256_set1_pd(-0.0);
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_xor_pd(_mm256_loadu_pd(q + i), sign);
    _mm256_storeu_pd(out + i, exp_nonpos4(x));
  }
  for (; i < n; ++i) out[i] = exp_nonpos(-q[i]);
}

void exp_neg_accum_avx2(double* acc, const double* q, double w, std::size_t n) {
  std::size_t i = 0;
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d wv = _mm256_set1_pd(w);
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_xor_pd(_mm256_loadu_pd(q + i), sign);
    const __m256d e = exp_nonpos4(x);
    const __m256d a = _mm256_loadu_pd(acc + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_mul_pd(wv, e)));
  }
  for (; i < n; ++i) acc[i] = acc[i] + w * exp_nonpos(-q[i]);
}

void advect_row_avx2(const double* c, const double* nu_c, const double* up,
                     const double* nu_up, const double* dn, const double* nu_dn,
                     double* out, std::size_t n) {
  std::size_t i = 0;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  for (; i + 4 <= n; i += 4) {
    const __m256d nc = _mm256_loadu_pd(nu_c + i);
    const __m256d stay = _mm256_mul_pd(
        _mm256_loadu_pd(c + i), _mm256_sub_pd(one, _mm256_and_pd(nc, abs_mask)));
    const __m256d fu = _mm256_mul_pd(
        _mm256_loadu_pd(up + i), _mm256_max_pd(_mm256_loadu_pd(nu_up + i), zero));
    const __m256d nd = _mm256_sub_pd(zero, _mm256_loadu_pd(nu_dn + i));
    const __m256d fd = _mm256_mul_pd(_mm256_loadu_pd(dn + i), _mm256_max_pd(nd, zero));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_add_pd(stay, fu), fd));
  }
  for (; i < n; ++i) {
    const double stay = c[i] * (1.0 - std::abs(nu_c[i]));
    const double from_up = up[i] * std::max(nu_up[i], 0.0);
    const double from_dn = dn[i] * std::max(-nu_dn[i], 0.0);
    out[i] = stay + from_up + from_dn;
  }
}

void stencil3_avx2(const double* c, const double* up, const double* dn,
                   double alpha, double* out, std::size_t n) {
  std::size_t i = 0;
  const __m256d a = _mm256_set1_pd(alpha);
  const __m256d two = _mm256_set1_pd(2.0);
  for (; i + 4 <= n; i += 4) {
    const __m256d cc = _mm256_loadu_pd(c + i);
    const __m256d lap = _mm256_sub_pd(
        _mm256_add_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(dn + i)),
        _mm256_mul_pd(two, cc));
    _mm256_storeu_pd(out + i, _mm256_add_pd(cc, _mm256_mul_pd(a, lap)));
  }
  for (; i < n; ++i) out[i] = c[i] + alpha * ((up[i] + dn[i]) - 2.0 * c[i]);
}

void stencil3_accum_avx2(double* out, const double* c, const double* up,
                         const double* dn, double alpha, std::size_t n) {
  std::size_t i = 0;
  const __m256d a = _mm256_set1_pd(alpha);
  const __m256d two = _mm256_set1_pd(2.0);
  for (; i + 4 <= n; i += 4) {
    const __m256d cc = _mm256_loadu_pd(c + i);
    const __m256d lap = _mm256_sub_pd(
        _mm256_add_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(dn + i)),
        _mm256_mul_pd(two, cc));
    const __m256d o = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(o, _mm256_mul_pd(a, lap)));
  }
  for (; i < n; ++i) out[i] = out[i] + alpha * ((up[i] + dn[i]) - 2.0 * c[i]);
}

void blend_avx2(const double* a, const double* b, double gamma, double* out,
                std::size_t n) {
  std::size_t i = 0;
  const __m256d g = _mm256_set1_pd(gamma);
  const __m256d og = _mm256_set1_pd(1.0 - gamma);
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_mul_pd(og, _mm256_loadu_pd(a + i));
    const __m256d vb = _mm256_mul_pd(g, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(va, vb));
  }
  const double ogs = 1.0 - gamma;
  for (; i < n; ++i) out[i] = ogs * a[i] + gamma * b[i];
}

double sum_avx2(const double* x, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
  for (; i < n; ++i) s += x[i];
  return s;
}

double abs_diff_sum_avx2(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_and_pd(d, abs_mask));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
  for (; i < n; ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table{exp_neg_avx2,  exp_neg_accum_avx2, advect_row_avx2,
                         stencil3_avx2, stencil3_accum_avx2, blend_avx2,
                         sum_avx2,      abs_diff_sum_avx2,  "avx2"};
  return table;
}

}  // namespace mfg::kernels

#endif  // x86
