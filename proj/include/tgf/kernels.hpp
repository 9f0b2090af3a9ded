#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the field and spectral layers.
// Two implementations exist: a scalar reference and an AVX2 variant; the
// active one is chosen at runtime from CPU capabilities (overridable with
// the environment variable TGF_CDA_SIMD=scalar|avx2|auto).
//
// Both implementations are bit-identical by construction: no fused
// multiply-add is used, and every reduction accumulates into four
// interleaved partial sums (lane j takes elements with index % 4 == j)
// combined as (s0 + s1) + (s2 + s3).

namespace tgf::kernels {

struct Table {
    const char* name;

    /// y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// x[i] *= a
    void (*scale)(double a, double* x, std::size_t n);
    /// out[i] = a[i] * b[i]
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    /// sum of x[i]
    double (*sum)(const double* x, std::size_t n);
    /// sum of x[i]^2
    double (*sumsq)(const double* x, std::size_t n);
    /// sum of a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// max of |x[i]| (returns 0 for n = 0; poisoned by NaN via sum guard elsewhere)
    double (*max_abs)(const double* x, std::size_t n);

    /// Complex buffers are interleaved (re, im) pairs; f holds one real
    /// factor per complex entry. z[k] *= f[k].
    void (*cscale)(const double* f, double* z, std::size_t n_cplx);
    /// out[k] = i * k_fac[k] * z[k]  (spectral derivative; multiply by i*k)
    void (*cderiv)(const double* k_fac, const double* z, double* out, std::size_t n_cplx);
    /// out[k] += i * k_fac[k] * z[k]
    void (*cderiv_acc)(const double* k_fac, const double* z, double* out, std::size_t n_cplx);
    /// y[k] += a * x[k] over complex entries (2*n_cplx doubles)
    void (*caxpy)(double a, const double* x, double* y, std::size_t n_cplx);

    /// Per-mode orthogonal projection onto divergence-free fields:
    /// s = px*u1 + py*u2; u1 -= px*s; u2 -= py*s, with (px,py) the unit
    /// wavevector (zeroed entries leave the mode untouched; the zero mode
    /// uses px=py=0 plus an explicit mean kill by the caller).
    void (*leray)(const double* px, const double* py, double* u1, double* u2,
                  std::size_t n_cplx);

    /// Symmetric 2x2 tensor algebra on component planes.
    /// Matrix square G = E*E: g11 = e11^2 + e12^2, g12 = e12*(e11 + e22),
    /// g22 = e12^2 + e22^2.
    void (*strain_square)(const double* e11, const double* e12, const double* e22,
                          double* g11, double* g12, double* g22, std::size_t n);
    /// Cubic stress T = |E|^2 E with |E|^2 = e11^2 + e22^2 + 2 e12^2.
    void (*strain_cubic)(const double* e11, const double* e12, const double* e22,
                         double* t11, double* t12, double* t22, std::size_t n);
    /// sum over the grid of (e11^2 + e22^2 + 2 e12^2)^2
    double (*strain_quartic_sum)(const double* e11, const double* e12, const double* e22,
                                 std::size_t n);
    /// Advection products from velocity and its gradient:
    /// w_i = u1*dx(u_i) + u2*dy(u_i), q11 = u1*u1, q12 = u1*u2, q22 = u2*u2.
    void (*advect_products)(const double* u1, const double* u2,
                            const double* d1x, const double* d1y,
                            const double* d2x, const double* d2y,
                            double* w1, double* w2,
                            double* q11, double* q12, double* q22, std::size_t n);
};

/// The runtime-selected table (resolved once, thread-safe).
const Table& active();

/// The scalar reference implementation (always available).
const Table& scalar_table();

/// The AVX2 implementation, or nullptr when unsupported by the build or CPU.
const Table* avx2_table();

}  // namespace tgf::kernels
