#pragma once
// Grid arithmetic kernels: scalar reference implementations plus AVX2
// variants selected once at startup. All elementwise kernels perform the
// same per-element operation sequence in both lanes, so their outputs are
// bit-identical; reductions differ only in accumulation order.

#include <cstddef>

namespace mfg::kernels {

struct Ops {
  // out[i] = exp(-q[i]), q[i] >= 0 expected; inputs below the underflow
  // threshold produce exact 0.
  void (*exp_neg)(const double* q, double* out, std::size_t n);
  // acc[i] += w * exp(-q[i])
  void (*exp_neg_accum)(double* acc, const double* q, double w, std::size_t n);
  // Donor-cell update, gather form:
  //   out[i] = c[i]*(1-|nu_c[i]|) + up[i]*max(nu_up[i],0) + dn[i]*max(-nu_dn[i],0)
  // where up/dn are the neighbor rows in the upwind/downwind direction and
  // nu_* are signed Courant numbers. Caller supplies zero ghost rows.
  void (*advect_row)(const double* c, const double* nu_c, const double* up,
                     const double* nu_up, const double* dn, const double* nu_dn,
                     double* out, std::size_t n);
  // Three-point diffusion stencil: out[i] = c[i] + alpha*(up[i] + dn[i] - 2*c[i])
  void (*stencil3)(const double* c, const double* up, const double* dn,
                   double alpha, double* out, std::size_t n);
  // Accumulating variant: out[i] += alpha*(up[i] + dn[i] - 2*c[i])
  void (*stencil3_accum)(double* out, const double* c, const double* up,
                         const double* dn, double alpha, std::size_t n);
  // out[i] = (1-gamma)*a[i] + gamma*b[i]
  void (*blend)(const double* a, const double* b, double gamma, double* out,
                std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);
  const char* name;
};

// Kernel set picked for the current CPU (AVX2+FMA when available).
const Ops& ops();

// Plain-loop reference set, always available.
const Ops& scalar_ops();

bool cpu_has_avx2();

}  // namespace mfg::kernels
