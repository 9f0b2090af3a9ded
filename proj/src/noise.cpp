#include "tgf/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tgf/kernels.hpp"

namespace tgf {
namespace {

// Stateless 64-bit mixing step used to turn (seed, stream) into one
// decorrelated engine seed.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Spectral index of the positive-kx representative of an integer mode.
std::size_t mode_entry(const DomainSpec& g, int kx, int ky) {
    const int iy = ky >= 0 ? ky : ky + g.n;
    return static_cast<std::size_t>(iy) * spectral_cols(g.n) + kx;
}

// Coefficient the mode's basis pair places at its +k spectral entry for
// phase amplitudes (c, s): c q_cos + s q_sin has value
// amp * (c - i s) * dir at +k, with amp = sqrt(2/area) / 2.
cplx phase_coefficient(const DomainSpec& g, double c, double s) {
    const double amp = 0.5 * std::sqrt(2.0 / g.area);
    return cplx{amp * c, -amp * s};
}

// Reads the (cosine, sine) coefficients of field f in the mode's basis
// pair: (f, q_cos) = sqrt(2 area) (dir . Re f_k),
// (f, q_sin) = -sqrt(2 area) (dir . Im f_k).
void read_mode(const SpectralField& f, const NoiseMode& m, double& c, double& s) {
    const std::size_t idx = mode_entry(f.domain, m.kx, m.ky);
    const cplx f1 = f.component(0)[idx];
    const cplx f2 = f.component(1)[idx];
    const double re = m.dir_x * f1.real() + m.dir_y * f2.real();
    const double im = m.dir_x * f1.imag() + m.dir_y * f2.imag();
    const double fac = std::sqrt(2.0 * f.domain.area);
    c = fac * re;
    s = -fac * im;
}

// Adds coeff * dir to the mode's +k entry, mirroring the conjugate into
// the -k entry when the mode lives in the kx = 0 column (where the half
// spectrum stores both).
void deposit_mode(SpectralField& f, const NoiseMode& m, cplx coeff) {
    const std::size_t idx = mode_entry(f.domain, m.kx, m.ky);
    f.component(0)[idx] += coeff * m.dir_x;
    f.component(1)[idx] += coeff * m.dir_y;
    if (m.kx == 0) {
        const std::size_t conj_idx = mode_entry(f.domain, 0, -m.ky);
        f.component(0)[conj_idx] += std::conj(coeff) * m.dir_x;
        f.component(1)[conj_idx] += std::conj(coeff) * m.dir_y;
    }
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream),
      gen_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double PathRng::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double PathRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on explicitly constructed uniforms; the standard library's
    // normal_distribution is not pinned across implementations, and
    // bit-reproducibility is part of the contract here.
    const double u1 = 1.0 - uniform();  // in (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

NoiseCoefficient make_coefficient(NoiseKind kind, double sigma0, double sigma1) {
    if (sigma0 < 0.0 || sigma1 < 0.0)
        throw std::invalid_argument("noise coefficient: amplitudes must be nonnegative");
    if (kind == NoiseKind::Additive && sigma1 != 0.0)
        throw std::invalid_argument("noise coefficient: additive kind requires sigma1 = 0");
    return NoiseCoefficient{kind, sigma0, kind == NoiseKind::Additive ? 0.0 : sigma1};
}

NoiseModel build_noise(int k_max, double a, double s, const DomainSpec& grid) {
    if (k_max < 1) throw std::invalid_argument("noise: k_max must be at least 1");
    if (!(a > 0.0)) throw std::invalid_argument("noise: amplitude a must be positive");
    if (!(s > 1.0)) throw std::invalid_argument("noise: decay s must exceed 1");
    if (k_max > grid.n / 2 - 1)
        throw std::invalid_argument("noise: k_max exceeds the grid's retained band");

    NoiseModel m;
    m.domain = grid;
    m.k_max = k_max;
    m.a = a;
    m.s = s;
    const double base = 2.0 * std::numbers::pi / grid.L;
    for (int kx = 0; kx <= k_max; ++kx) {
        for (int ky = -k_max; ky <= k_max; ++ky) {
            if (kx == 0 && ky <= 0) continue;  // half-space representatives only
            const double k2_int = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            if (k2_int > static_cast<double>(k_max) * k_max) continue;
            NoiseMode mode;
            mode.kx = kx;
            mode.ky = ky;
            const double k_phys = base * std::sqrt(k2_int);
            mode.mu = a * std::pow(k_phys, -2.0 * s);
            const double inv_len = 1.0 / std::sqrt(k2_int);
            mode.dir_x = ky * inv_len;
            mode.dir_y = -kx * inv_len;
            m.modes.push_back(mode);
            m.trace += 2.0 * mode.mu;
            if (mode.mu > m.mu_max) m.mu_max = mode.mu;
        }
    }
    return m;
}

void sample_increment_spectral(const NoiseModel& model, double dt, PathRng& rng,
                               SpectralField& out) {
    if (!(dt > 0.0)) throw std::invalid_argument("noise: dt must be positive");
    std::fill(out.data.begin(), out.data.end(), cplx{0.0, 0.0});
    for (const NoiseMode& m : model.modes) {
        const double sd = std::sqrt(m.mu * dt);
        const double gc = sd * rng.normal();
        const double gs = sd * rng.normal();
        deposit_mode(out, m, phase_coefficient(model.domain, gc, gs));
    }
}

VelocityField sample_increment(const NoiseModel& model, double dt, PathRng& rng) {
    SpectralField s(model.domain, 2);
    sample_increment_spectral(model, dt, rng, s);
    return inverse_velocity(std::move(s));
}

void apply_coefficient_spectral(const NoiseCoefficient& coeff, const NoiseModel& model,
                                const SpectralField& xi, const SpectralField& dW,
                                SpectralField& out) {
    if (!xi.domain.same_grid(model.domain) || !dW.domain.same_grid(model.domain))
        throw std::invalid_argument("noise: field grid does not match the model");
    std::fill(out.data.begin(), out.data.end(), cplx{0.0, 0.0});
    kernels::active().caxpy(coeff.sigma0, reinterpret_cast<const double*>(dW.data.data()),
                            reinterpret_cast<double*>(out.data.data()), dW.data.size());
    if (coeff.kind != NoiseKind::DiagonalMultiplicative || coeff.sigma1 == 0.0) return;
    for (const NoiseMode& m : model.modes) {
        double xc, xs, wc, ws;
        read_mode(xi, m, xc, xs);
        read_mode(dW, m, wc, ws);
        deposit_mode(out, m,
                     phase_coefficient(model.domain, coeff.sigma1 * xc * wc,
                                       coeff.sigma1 * xs * ws));
    }
}

VelocityField apply_coefficient(const NoiseCoefficient& coeff, const NoiseModel& model,
                                const VelocityField& xi, const VelocityField& dW) {
    SpectralField sx = forward(xi);
    SpectralField sw = forward(dW);
    SpectralField out(model.domain, 2);
    apply_coefficient_spectral(coeff, model, sx, sw, out);
    return inverse_velocity(std::move(out));
}

double hs_norm_spectral(const NoiseCoefficient& coeff, const NoiseModel& model,
                        const SpectralField& xi) {
    if (coeff.kind == NoiseKind::Additive || coeff.sigma1 == 0.0)
        return coeff.sigma0 * coeff.sigma0 * model.trace;
    double total = 0.0;
    for (const NoiseMode& m : model.modes) {
        double xc, xs;
        read_mode(xi, m, xc, xs);
        const double fc = coeff.sigma0 + coeff.sigma1 * xc;
        const double fs = coeff.sigma0 + coeff.sigma1 * xs;
        total += m.mu * (fc * fc + fs * fs);
    }
    return total;
}

double hs_norm(const NoiseCoefficient& coeff, const NoiseModel& model, const VelocityField& xi) {
    if (coeff.kind == NoiseKind::Additive || coeff.sigma1 == 0.0)
        return coeff.sigma0 * coeff.sigma0 * model.trace;
    return hs_norm_spectral(coeff, model, forward(xi));
}

VelocityField noise_basis_field(const NoiseModel& model, std::size_t mode_index, bool sine_phase) {
    if (mode_index >= model.modes.size())
        throw std::out_of_range("noise: basis index out of range");
    SpectralField s(model.domain, 2);
    deposit_mode(s, model.modes[mode_index],
                 phase_coefficient(model.domain, sine_phase ? 0.0 : 1.0, sine_phase ? 1.0 : 0.0));
    return inverse_velocity(std::move(s));
}

}  // namespace tgf
