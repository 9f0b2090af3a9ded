#include "tgf/kernels.hpp"

#include <cmath>

// Scalar reference kernels. Reductions keep four interleaved partial sums so
// the AVX2 variant (one lane per residue class) produces bit-identical
// results; see kernels.hpp.

namespace tgf::kernels {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double sum(const double* x, std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s[i & 3] += x[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double sumsq(const double* x, std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s[i & 3] += x[i] * x[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s[i & 3] += a[i] * b[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

void cscale(const double* f, double* z, std::size_t n_cplx) {
    for (std::size_t k = 0; k < n_cplx; ++k) {
        z[2 * k] *= f[k];
        z[2 * k + 1] *= f[k];
    }
}

void cderiv(const double* k_fac, const double* z, double* out, std::size_t n_cplx) {
    for (std::size_t k = 0; k < n_cplx; ++k) {
        double re = z[2 * k];
        double im = z[2 * k + 1];
        out[2 * k] = -k_fac[k] * im;
        out[2 * k + 1] = k_fac[k] * re;
    }
}

void cderiv_acc(const double* k_fac, const double* z, double* out, std::size_t n_cplx) {
    for (std::size_t k = 0; k < n_cplx; ++k) {
        double re = z[2 * k];
        double im = z[2 * k + 1];
        out[2 * k] += -k_fac[k] * im;
        out[2 * k + 1] += k_fac[k] * re;
    }
}

void caxpy(double a, const double* x, double* y, std::size_t n_cplx) {
    for (std::size_t i = 0; i < 2 * n_cplx; ++i) y[i] += a * x[i];
}

void leray(const double* px, const double* py, double* u1, double* u2,
           std::size_t n_cplx) {
    for (std::size_t k = 0; k < n_cplx; ++k) {
        double sre = px[k] * u1[2 * k] + py[k] * u2[2 * k];
        double sim = px[k] * u1[2 * k + 1] + py[k] * u2[2 * k + 1];
        u1[2 * k] -= px[k] * sre;
        u1[2 * k + 1] -= px[k] * sim;
        u2[2 * k] -= py[k] * sre;
        u2[2 * k + 1] -= py[k] * sim;
    }
}

void strain_square(const double* e11, const double* e12, const double* e22,
                   double* g11, double* g12, double* g22, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double a = e11[i], b = e12[i], c = e22[i];
        g11[i] = a * a + b * b;
        g12[i] = b * (a + c);
        g22[i] = b * b + c * c;
    }
}

void strain_cubic(const double* e11, const double* e12, const double* e22,
                  double* t11, double* t12, double* t22, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double a = e11[i], b = e12[i], c = e22[i];
        double m = a * a + c * c + 2.0 * (b * b);
        t11[i] = m * a;
        t12[i] = m * b;
        t22[i] = m * c;
    }
}

double strain_quartic_sum(const double* e11, const double* e12, const double* e22,
                          std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        double a = e11[i], b = e12[i], c = e22[i];
        double m = a * a + c * c + 2.0 * (b * b);
        s[i & 3] += m * m;
    }
    return (s[0] + s[1]) + (s[2] + s[3]);
}

void advect_products(const double* u1, const double* u2,
                     const double* d1x, const double* d1y,
                     const double* d2x, const double* d2y,
                     double* w1, double* w2,
                     double* q11, double* q12, double* q22, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double a = u1[i], b = u2[i];
        w1[i] = a * d1x[i] + b * d1y[i];
        w2[i] = a * d2x[i] + b * d2y[i];
        q11[i] = a * a;
        q12[i] = a * b;
        q22[i] = b * b;
    }
}

constexpr Table kScalarTable = {
    "scalar", axpy,  scale,         mul,          sum,          sumsq,
    dot,      max_abs, cscale,      cderiv,       cderiv_acc,   caxpy,
    leray,    strain_square, strain_cubic, strain_quartic_sum, advect_products,
};

}  // namespace

const Table& scalar_table() { return kScalarTable; }

}  // namespace tgf::kernels
