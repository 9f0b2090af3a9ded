#include "tgf/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "tgf/kernels.hpp"

namespace tgf {
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

// One plan pair per grid size, created lazily under a lock and kept for the
// process lifetime. Plans use FFTW_ESTIMATE only: measured planning picks
// algorithms from runtime timings, which would make output depend on machine
// load, and byte-stable output matters more here than the last few percent
// of transform speed. Execution uses the new-array interface; every buffer
// that reaches it comes from the 64-byte aligned allocator, matching the
// alignment class the plans were created with.
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

const PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    AVec real(static_cast<std::size_t>(n) * n);
    CVec spec(spectral_size(n));
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_2d(n, n, real.data(),
                                 reinterpret_cast<fftw_complex*>(spec.data()),
                                 FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(spec.data()),
                                 real.data(), FFTW_ESTIMATE);
    if (p.fwd == nullptr || p.inv == nullptr)
        throw std::runtime_error("spectral: transform planning failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

WaveTable make_wave_table(const DomainSpec& g) {
    WaveTable t;
    t.n = g.n;
    t.L = g.L;
    std::size_t m = spectral_size(g.n);
    t.kx.resize(m);
    t.ky.resize(m);
    t.k2.resize(m);
    t.px.resize(m);
    t.py.resize(m);
    t.w.resize(m);
    const double base = 2.0 * std::numbers::pi / g.L;
    const int cols = spectral_cols(g.n);
    for (int iy = 0; iy < g.n; ++iy) {
        const double ky = base * signed_ky(g.n, iy);
        for (int ikx = 0; ikx < cols; ++ikx) {
            const std::size_t idx = static_cast<std::size_t>(iy) * cols + ikx;
            const double kx = base * ikx;
            const double k2 = kx * kx + ky * ky;
            t.kx[idx] = kx;
            t.ky[idx] = ky;
            t.k2[idx] = k2;
            const double inv_len = k2 > 0.0 ? 1.0 / std::sqrt(k2) : 0.0;
            t.px[idx] = kx * inv_len;
            t.py[idx] = ky * inv_len;
            t.w[idx] = ikx == 0 ? 1.0 : 2.0;
        }
    }
    return t;
}

void forward_c(const DomainSpec& g, const double* phys, cplx* spec) {
    const PlanPair& p = plans_for(g.n);
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(phys),
                         reinterpret_cast<fftw_complex*>(spec));
    // Uniform rescale to mathematical coefficients.
    const double inv_n2 = 1.0 / (static_cast<double>(g.n) * g.n);
    double* raw = reinterpret_cast<double*>(spec);
    kernels::active().scale(inv_n2, raw, 2 * spectral_size(g.n));
    // Band limit: clear the Nyquist column and row so retained content is
    // strictly inside |k| <= n/2 - 1 per axis.
    const int cols = spectral_cols(g.n);
    const int nyq = g.n / 2;
    for (int iy = 0; iy < g.n; ++iy) spec[static_cast<std::size_t>(iy) * cols + nyq] = cplx{0.0, 0.0};
    for (int ikx = 0; ikx < cols; ++ikx)
        spec[static_cast<std::size_t>(nyq) * cols + ikx] = cplx{0.0, 0.0};
}

void inverse_c(const DomainSpec& g, cplx* spec, double* phys) {
    const PlanPair& p = plans_for(g.n);
    fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(spec), phys);
}

SpectralField forward(const VelocityField& f) {
    SpectralField s(f.domain, f.domain.d);
    for (int c = 0; c < f.domain.d; ++c) forward_c(f.domain, f.component(c), s.component(c));
    return s;
}

SpectralField forward(const TensorField& f) {
    const int nc = f.domain.d * f.domain.d;
    SpectralField s(f.domain, nc);
    for (int c = 0; c < nc; ++c)
        forward_c(f.domain, f.data.data() + static_cast<std::size_t>(c) * f.domain.samples_per_component(),
                  s.component(c));
    return s;
}

VelocityField inverse_velocity(SpectralField s) {
    VelocityField f(s.domain);
    for (int c = 0; c < s.comps; ++c) inverse_c(s.domain, s.component(c), f.component(c));
    return f;
}

void transfer(const SpectralField& src, SpectralField& dst) {
    if (src.comps != dst.comps)
        throw std::invalid_argument("spectral transfer: component count mismatch");
    std::fill(dst.data.begin(), dst.data.end(), cplx{0.0, 0.0});
    const int b = std::min(src.domain.n, dst.domain.n) / 2 - 1;
    const int scols = spectral_cols(src.domain.n);
    const int dcols = spectral_cols(dst.domain.n);
    for (int c = 0; c < src.comps; ++c) {
        const cplx* in = src.component(c);
        cplx* out = dst.component(c);
        for (int ky = -b; ky <= b; ++ky) {
            const int iys = ky >= 0 ? ky : ky + src.domain.n;
            const int iyd = ky >= 0 ? ky : ky + dst.domain.n;
            std::memcpy(out + static_cast<std::size_t>(iyd) * dcols,
                        in + static_cast<std::size_t>(iys) * scols,
                        static_cast<std::size_t>(b + 1) * sizeof(cplx));
        }
    }
}

double plancherel_sumsq(const SpectralField& s) {
    const int cols = spectral_cols(s.domain.n);
    double total = 0.0;
    for (int c = 0; c < s.comps; ++c) {
        const cplx* z = s.component(c);
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t idx = 0; idx < spectral_size(s.domain.n); ++idx) {
            const double w = (idx % cols == 0) ? 1.0 : 2.0;
            const double re = z[idx].real();
            const double im = z[idx].imag();
            acc[idx & 3] += w * (re * re + im * im);
        }
        total += (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    return total;
}

double plancherel_weighted_sumsq(const SpectralField& s, const double* factor) {
    const int cols = spectral_cols(s.domain.n);
    double total = 0.0;
    for (int c = 0; c < s.comps; ++c) {
        const cplx* z = s.component(c);
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t idx = 0; idx < spectral_size(s.domain.n); ++idx) {
            const double w = (idx % cols == 0) ? 1.0 : 2.0;
            const double re = z[idx].real();
            const double im = z[idx].imag();
            acc[idx & 3] += w * factor[idx] * (re * re + im * im);
        }
        total += (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    return total;
}

double divergence_norm(const SpectralField& s, const WaveTable& t) {
    if (s.comps != 2) throw std::invalid_argument("divergence_norm: expects a velocity spectrum");
    const cplx* u1 = s.component(0);
    const cplx* u2 = s.component(1);
    const int cols = spectral_cols(s.domain.n);
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t idx = 0; idx < spectral_size(s.domain.n); ++idx) {
        const double w = (idx % cols == 0) ? 1.0 : 2.0;
        const double re = t.kx[idx] * u1[idx].real() + t.ky[idx] * u2[idx].real();
        const double im = t.kx[idx] * u1[idx].imag() + t.ky[idx] * u2[idx].imag();
        acc[idx & 3] += w * (re * re + im * im);
    }
    const double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    return std::sqrt(s.domain.area * sum);
}

void project_spectral(SpectralField& s, const WaveTable& t) {
    if (s.comps != 2) throw std::invalid_argument("project_spectral: expects a velocity spectrum");
    kernels::active().leray(t.px.data(), t.py.data(),
                            reinterpret_cast<double*>(s.component(0)),
                            reinterpret_cast<double*>(s.component(1)),
                            spectral_size(s.domain.n));
    // The unit wavevector is zero at the mean mode, so the loop above leaves
    // it untouched; the projector also annihilates constants.
    s.component(0)[0] = cplx{0.0, 0.0};
    s.component(1)[0] = cplx{0.0, 0.0};
}

}  // namespace tgf
