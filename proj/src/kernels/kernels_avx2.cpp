#include "tgf/kernels.hpp"

// AVX2 kernel variants. Each loop mirrors the scalar reference exactly:
// no fused multiply-add, identical association order, and reductions use
// one vector lane per index residue class so results are bit-identical.

#if defined(TGF_BUILD_AVX2) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace tgf::kernels {
namespace {

inline double combine4(const double s[4]) { return (s[0] + s[1]) + (s[2] + s[3]); }

void axpy(double a, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    for (; i < n; ++i) x[i] *= a;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; i < n; ++i) s[i & 3] += x[i];
    return combine4(s);
}

double sumsq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; i < n; ++i) s[i & 3] += x[i] * x[i];
    return combine4(s);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; i < n; ++i) s[i & 3] += a[i] * b[i];
    return combine4(s);
}

double max_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_set1_pd(-0.0);
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, _mm256_andnot_pd(mask, _mm256_loadu_pd(x + i)));
    alignas(32) double s[4];
    _mm256_store_pd(s, vm);
    double m = (s[0] > s[1] ? s[0] : s[1]);
    double m2 = (s[2] > s[3] ? s[2] : s[3]);
    if (m2 > m) m = m2;
    for (; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

// Duplicate two packed factors (f0, f1) into (f0, f0, f1, f1).
inline __m256d dup2(const double* f) {
    __m128d fl = _mm_loadu_pd(f);
    return _mm256_insertf128_pd(_mm256_castpd128_pd256(_mm_unpacklo_pd(fl, fl)),
                                _mm_unpackhi_pd(fl, fl), 1);
}

void cscale(const double* f, double* z, std::size_t n_cplx) {
    std::size_t k = 0;
    for (; k + 2 <= n_cplx; k += 2) {
        __m256d vz = _mm256_loadu_pd(z + 2 * k);
        _mm256_storeu_pd(z + 2 * k, _mm256_mul_pd(vz, dup2(f + k)));
    }
    for (; k < n_cplx; ++k) {
        z[2 * k] *= f[k];
        z[2 * k + 1] *= f[k];
    }
}

void cderiv(const double* k_fac, const double* z, double* out, std::size_t n_cplx) {
    // (re, im) -> (-k*im, k*re): swap within pairs, then multiply by (-k, k).
    const __m256d sign = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
    std::size_t k = 0;
    for (; k + 2 <= n_cplx; k += 2) {
        __m256d vz = _mm256_loadu_pd(z + 2 * k);
        __m256d swapped = _mm256_permute_pd(vz, 0b0101);
        __m256d kk = _mm256_xor_pd(dup2(k_fac + k), sign);
        _mm256_storeu_pd(out + 2 * k, _mm256_mul_pd(kk, swapped));
    }
    for (; k < n_cplx; ++k) {
        double re = z[2 * k];
        double im = z[2 * k + 1];
        out[2 * k] = -k_fac[k] * im;
        out[2 * k + 1] = k_fac[k] * re;
    }
}

void cderiv_acc(const double* k_fac, const double* z, double* out, std::size_t n_cplx) {
    const __m256d sign = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
    std::size_t k = 0;
    for (; k + 2 <= n_cplx; k += 2) {
        __m256d vz = _mm256_loadu_pd(z + 2 * k);
        __m256d swapped = _mm256_permute_pd(vz, 0b0101);
        __m256d kk = _mm256_xor_pd(dup2(k_fac + k), sign);
        __m256d vo = _mm256_loadu_pd(out + 2 * k);
        _mm256_storeu_pd(out + 2 * k, _mm256_add_pd(vo, _mm256_mul_pd(kk, swapped)));
    }
    for (; k < n_cplx; ++k) {
        double re = z[2 * k];
        double im = z[2 * k + 1];
        out[2 * k] += -k_fac[k] * im;
        out[2 * k + 1] += k_fac[k] * re;
    }
}

void caxpy(double a, const double* x, double* y, std::size_t n_cplx) {
    axpy(a, x, y, 2 * n_cplx);
}

void leray(const double* px, const double* py, double* u1, double* u2,
           std::size_t n_cplx) {
    std::size_t k = 0;
    for (; k + 2 <= n_cplx; k += 2) {
        __m256d vpx = dup2(px + k);
        __m256d vpy = dup2(py + k);
        __m256d v1 = _mm256_loadu_pd(u1 + 2 * k);
        __m256d v2 = _mm256_loadu_pd(u2 + 2 * k);
        __m256d vs = _mm256_add_pd(_mm256_mul_pd(vpx, v1), _mm256_mul_pd(vpy, v2));
        _mm256_storeu_pd(u1 + 2 * k, _mm256_sub_pd(v1, _mm256_mul_pd(vpx, vs)));
        _mm256_storeu_pd(u2 + 2 * k, _mm256_sub_pd(v2, _mm256_mul_pd(vpy, vs)));
    }
    for (; k < n_cplx; ++k) {
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
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(e11 + i);
        __m256d b = _mm256_loadu_pd(e12 + i);
        __m256d c = _mm256_loadu_pd(e22 + i);
        __m256d bb = _mm256_mul_pd(b, b);
        _mm256_storeu_pd(g11 + i, _mm256_add_pd(_mm256_mul_pd(a, a), bb));
        _mm256_storeu_pd(g12 + i, _mm256_mul_pd(b, _mm256_add_pd(a, c)));
        _mm256_storeu_pd(g22 + i, _mm256_add_pd(bb, _mm256_mul_pd(c, c)));
    }
    for (; i < n; ++i) {
        double a = e11[i], b = e12[i], c = e22[i];
        g11[i] = a * a + b * b;
        g12[i] = b * (a + c);
        g22[i] = b * b + c * c;
    }
}

void strain_cubic(const double* e11, const double* e12, const double* e22,
                  double* t11, double* t12, double* t22, std::size_t n) {
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(e11 + i);
        __m256d b = _mm256_loadu_pd(e12 + i);
        __m256d c = _mm256_loadu_pd(e22 + i);
        __m256d m = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(c, c)),
            _mm256_mul_pd(two, _mm256_mul_pd(b, b)));
        _mm256_storeu_pd(t11 + i, _mm256_mul_pd(m, a));
        _mm256_storeu_pd(t12 + i, _mm256_mul_pd(m, b));
        _mm256_storeu_pd(t22 + i, _mm256_mul_pd(m, c));
    }
    for (; i < n; ++i) {
        double a = e11[i], b = e12[i], c = e22[i];
        double m = a * a + c * c + 2.0 * (b * b);
        t11[i] = m * a;
        t12[i] = m * b;
        t22[i] = m * c;
    }
}

double strain_quartic_sum(const double* e11, const double* e12, const double* e22,
                          std::size_t n) {
    const __m256d two = _mm256_set1_pd(2.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(e11 + i);
        __m256d b = _mm256_loadu_pd(e12 + i);
        __m256d c = _mm256_loadu_pd(e22 + i);
        __m256d m = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(c, c)),
            _mm256_mul_pd(two, _mm256_mul_pd(b, b)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(m, m));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; i < n; ++i) {
        double a = e11[i], b = e12[i], c = e22[i];
        double m = a * a + c * c + 2.0 * (b * b);
        s[i & 3] += m * m;
    }
    return combine4(s);
}

void advect_products(const double* u1, const double* u2,
                     const double* d1x, const double* d1y,
                     const double* d2x, const double* d2y,
                     double* w1, double* w2,
                     double* q11, double* q12, double* q22, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(u1 + i);
        __m256d b = _mm256_loadu_pd(u2 + i);
        _mm256_storeu_pd(w1 + i,
                         _mm256_add_pd(_mm256_mul_pd(a, _mm256_loadu_pd(d1x + i)),
                                       _mm256_mul_pd(b, _mm256_loadu_pd(d1y + i))));
        _mm256_storeu_pd(w2 + i,
                         _mm256_add_pd(_mm256_mul_pd(a, _mm256_loadu_pd(d2x + i)),
                                       _mm256_mul_pd(b, _mm256_loadu_pd(d2y + i))));
        _mm256_storeu_pd(q11 + i, _mm256_mul_pd(a, a));
        _mm256_storeu_pd(q12 + i, _mm256_mul_pd(a, b));
        _mm256_storeu_pd(q22 + i, _mm256_mul_pd(b, b));
    }
    for (; i < n; ++i) {
        double a = u1[i], b = u2[i];
        w1[i] = a * d1x[i] + b * d1y[i];
        w2[i] = a * d2x[i] + b * d2y[i];
        q11[i] = a * a;
        q12[i] = a * b;
        q22[i] = b * b;
    }
}

constexpr Table kAvx2Table = {
    "avx2",  axpy,  scale,         mul,          sum,          sumsq,
    dot,     max_abs, cscale,      cderiv,       cderiv_acc,   caxpy,
    leray,   strain_square, strain_cubic, strain_quartic_sum, advect_products,
};

}  // namespace

const Table* avx2_table_impl() { return &kAvx2Table; }

}  // namespace tgf::kernels

#else  // no AVX2 in this build

namespace tgf::kernels {
const Table* avx2_table_impl() { return nullptr; }
}  // namespace tgf::kernels

#endif
