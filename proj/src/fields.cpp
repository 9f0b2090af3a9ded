#include "tgf/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "tgf/kernels.hpp"
#include "tgf/norms.hpp"

namespace tgf {
namespace {

std::size_t entry_of(const DomainSpec& g, int kx, int ky) {
    const int iy = ky >= 0 ? ky : ky + g.n;
    return static_cast<std::size_t>(iy) * spectral_cols(g.n) + kx;
}

void deposit(SpectralField& s, int kx, int ky, cplx c1, cplx c2) {
    const std::size_t idx = entry_of(s.domain, kx, ky);
    s.component(0)[idx] += c1;
    s.component(1)[idx] += c2;
    if (kx == 0) {
        const std::size_t cidx = entry_of(s.domain, 0, -ky);
        s.component(0)[cidx] += std::conj(c1);
        s.component(1)[cidx] += std::conj(c2);
    }
}

void check_mode(const DomainSpec& g, int kx, int ky) {
    if (kx == 0 && ky == 0) throw std::invalid_argument("mode_field: zero mode not allowed");
    const int b = g.n / 2 - 1;
    if (kx < 0 || kx > b || ky < -b || ky > b)
        throw std::invalid_argument("mode_field: wavenumber outside the retained band");
}

}  // namespace

void add_mode_spectral(SpectralField& s, int kx, int ky, double amplitude, bool sine_phase) {
    check_mode(s.domain, kx, ky);
    const double len = std::sqrt(static_cast<double>(kx) * kx + static_cast<double>(ky) * ky);
    const double dx = ky / len;
    const double dy = -kx / len;
    // cos(k.x) has coefficient 1/2 at +k; sin(k.x) has -i/2.
    const cplx half = sine_phase ? cplx{0.0, -0.5} : cplx{0.5, 0.0};
    const cplx c = amplitude * half;
    deposit(s, kx, ky, c * dx, c * dy);
}

VelocityField mode_field(const DomainSpec& grid, int kx, int ky, double amplitude,
                         bool sine_phase) {
    SpectralField s(grid, 2);
    add_mode_spectral(s, kx, ky, amplitude, sine_phase);
    return inverse_velocity(std::move(s));
}

void random_solenoidal_spectral(SpectralField& s, int band, double decay, PathRng& rng) {
    const DomainSpec& g = s.domain;
    const int b = std::min(band, g.n / 2 - 1);
    if (b < 1) throw std::invalid_argument("random_solenoidal: band too small");
    // Fixed enumeration order (kx, then ky) for reproducibility.
    for (int kx = 0; kx <= b; ++kx) {
        for (int ky = -b; ky <= b; ++ky) {
            if (kx == 0 && ky <= 0) continue;
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            if (k2 > static_cast<double>(b) * b) continue;
            const double shape = std::pow(k2, -0.5 * decay);
            const cplx c1{shape * rng.normal(), shape * rng.normal()};
            const cplx c2{shape * rng.normal(), shape * rng.normal()};
            deposit(s, kx, ky, c1, c2);
        }
    }
    const WaveTable t = make_wave_table(g);
    project_spectral(s, t);
}

VelocityField random_solenoidal(const DomainSpec& grid, int band, double decay, PathRng& rng) {
    SpectralField s(grid, 2);
    random_solenoidal_spectral(s, band, decay, rng);
    return inverse_velocity(std::move(s));
}

VelocityField rescale_l2(const VelocityField& f, double target) {
    const double n = norm_l2(f);
    if (n == 0.0) throw std::invalid_argument("rescale_l2: zero field");
    VelocityField out = f;
    kernels::active().scale(target / n, out.data.data(), out.data.size());
    return out;
}

}  // namespace tgf
