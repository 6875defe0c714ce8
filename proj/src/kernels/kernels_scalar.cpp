#include "mfg/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/kernels/exp_detail.hpp"

namespace mfg::kernels {
namespace {

void exp_neg_scalar(const double* q, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::exp_nonpos(-q[i]);
}

void exp_neg_accum_scalar(double* acc, const double* q, double w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + w * detail::exp_nonpos(-q[i]);
}

void advect_row_scalar(const double* c, const double* nu_c, const double* up,
                       const double* nu_up, const double* dn, const double* nu_dn,
                       double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double stay = c[i] * (1.0 - std::abs(nu_c[i]));
    const double from_up = up[i] * std::max(nu_up[i], 0.0);
    const double from_dn = dn[i] * std::max(-nu_dn[i], 0.0);
    out[i] = stay + from_up + from_dn;
  }
}

void stencil3_scalar(const double* c, const double* up, const double* dn,
                     double alpha, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = c[i] + alpha * ((up[i] + dn[i]) - 2.0 * c[i]);
}

void stencil3_accum_scalar(double* out, const double* c, const double* up,
                           const double* dn, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = out[i] + alpha * ((up[i] + dn[i]) - 2.0 * c[i]);
}

void blend_scalar(const double* a, const double* b, double gamma, double* out,
                  std::size_t n) {
  const double og = 1.0 - gamma;
  for (std::size_t i = 0; i < n; ++i) out[i] = og * a[i] + gamma * b[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double abs_diff_sum_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{exp_neg_scalar,  exp_neg_accum_scalar,
                         advect_row_scalar, stencil3_scalar,
                         stencil3_accum_scalar, blend_scalar,
                         sum_scalar,      abs_diff_sum_scalar,
                         "scalar"};
  return table;
}

}  // namespace mfg::kernels
