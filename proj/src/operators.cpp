#include "tgf/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tgf/kernels.hpp"
#include "tgf/spectral.hpp"

namespace tgf {
namespace {

// Divergence tolerance for the advection preconditions, relative to the
// gradient scale of the field (a first-derivative quantity, like the
// divergence itself). Constant fields pass with 0 <= 0.
void require_divergence_free(const SpectralField& s, const WaveTable& t, const char* who) {
    const double div = divergence_norm(s, t);
    const double grad = std::sqrt(s.domain.area * plancherel_weighted_sumsq(s, t.k2.data()));
    if (div > 1e-8 * grad)
        throw std::invalid_argument(std::string(who) + ": first argument is not divergence-free");
}

// Strain spectrum on the field's own grid, as the three planes
// (e11, e12, e22) of the symmetric tensor: e11 = 2 i kx u1,
// e12 = i (ky u1 + kx u2), e22 = 2 i ky u2.
void strain_planes(const SpectralField& u, const WaveTable& t, SpectralField& e3) {
    const std::size_t m = spectral_size(u.domain.n);
    AVec fac(m);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < m; ++i) fac[i] = 2.0 * t.kx[i];
    k.cderiv(fac.data(), reinterpret_cast<const double*>(u.component(0)),
             reinterpret_cast<double*>(e3.component(0)), m);
    k.cderiv(t.ky.data(), reinterpret_cast<const double*>(u.component(0)),
             reinterpret_cast<double*>(e3.component(1)), m);
    k.cderiv_acc(t.kx.data(), reinterpret_cast<const double*>(u.component(1)),
                 reinterpret_cast<double*>(e3.component(1)), m);
    for (std::size_t i = 0; i < m; ++i) fac[i] = 2.0 * t.ky[i];
    k.cderiv(fac.data(), reinterpret_cast<const double*>(u.component(1)),
             reinterpret_cast<double*>(e3.component(2)), m);
}

// Shared tail of the stress operators: given the symmetric stress planes
// (s11, s12, s22) in physical space on a padded grid, form -P div(S) back
// on the base grid.
VelocityField negative_projected_divergence(const DomainSpec& base, const DomainSpec& fine,
                                            AVec& s11, AVec& s12, AVec& s22) {
    const std::size_t mf = spectral_size(fine.n);
    SpectralField stress(fine, 3);
    forward_c(fine, s11.data(), stress.component(0));
    forward_c(fine, s12.data(), stress.component(1));
    forward_c(fine, s22.data(), stress.component(2));

    const WaveTable tf = make_wave_table(fine);
    SpectralField div_fine(fine, 2);
    const auto& k = kernels::active();
    // div(S)_i = i (kx S_i1 + ky S_i2) with S21 = S12.
    k.cderiv(tf.kx.data(), reinterpret_cast<const double*>(stress.component(0)),
             reinterpret_cast<double*>(div_fine.component(0)), mf);
    k.cderiv_acc(tf.ky.data(), reinterpret_cast<const double*>(stress.component(1)),
                 reinterpret_cast<double*>(div_fine.component(0)), mf);
    k.cderiv(tf.kx.data(), reinterpret_cast<const double*>(stress.component(1)),
             reinterpret_cast<double*>(div_fine.component(1)), mf);
    k.cderiv_acc(tf.ky.data(), reinterpret_cast<const double*>(stress.component(2)),
                 reinterpret_cast<double*>(div_fine.component(1)), mf);

    SpectralField out(base, 2);
    transfer(div_fine, out);
    kernels::active().scale(-1.0, reinterpret_cast<double*>(out.data.data()),
                            2 * out.data.size());
    const WaveTable tb = make_wave_table(base);
    project_spectral(out, tb);
    return inverse_velocity(std::move(out));
}

}  // namespace

void validate_params(const FluidParams& p) {
    if (!(p.nu > 0.0)) throw std::invalid_argument("fluid: nu must be positive");
    if (!(p.beta > 0.0)) throw std::invalid_argument("fluid: beta must be positive");
    if (!(std::fabs(p.alpha) < std::sqrt(2.0 * p.nu * p.beta)))
        throw std::invalid_argument(
            "fluid: |alpha| must be strictly below sqrt(2 nu beta)");
}

double epsilon0(const FluidParams& p) {
    validate_params(p);
    return 1.0 - std::sqrt(p.alpha * p.alpha / (2.0 * p.beta * p.nu));
}

VelocityField leray_project(const VelocityField& u) {
    SpectralField s = forward(u);
    const WaveTable t = make_wave_table(u.domain);
    project_spectral(s, t);
    return inverse_velocity(std::move(s));
}

TensorField strain(const VelocityField& xi) {
    SpectralField u = forward(xi);
    const WaveTable t = make_wave_table(xi.domain);
    SpectralField e3(xi.domain, 3);
    strain_planes(u, t, e3);
    TensorField e(xi.domain, true);
    inverse_c(xi.domain, e3.component(0), e.entry(0, 0));
    inverse_c(xi.domain, e3.component(1), e.entry(0, 1));
    inverse_c(xi.domain, e3.component(2), e.entry(1, 1));
    std::copy(e.entry(0, 1), e.entry(0, 1) + xi.domain.samples_per_component(), e.entry(1, 0));
    return e;
}

VelocityField stokes(const VelocityField& xi) {
    SpectralField s = forward(xi);
    const WaveTable t = make_wave_table(xi.domain);
    for (int c = 0; c < 2; ++c)
        kernels::active().cscale(t.k2.data(), reinterpret_cast<double*>(s.component(c)),
                                 spectral_size(xi.domain.n));
    project_spectral(s, t);
    return inverse_velocity(std::move(s));
}

VelocityField advect(const VelocityField& xi, const VelocityField& zeta) {
    if (!xi.domain.same_grid(zeta.domain)) throw std::invalid_argument("advect: grid mismatch");
    const DomainSpec base = xi.domain;
    SpectralField sx = forward(xi);
    SpectralField sz = forward(zeta);
    const WaveTable tb = make_wave_table(base);
    require_divergence_free(sx, tb, "advect");

    const DomainSpec fine = make_grid(3 * base.n / 2, base.L);
    const WaveTable tf = make_wave_table(fine);
    const std::size_t mf = spectral_size(fine.n);
    const std::size_t nf = fine.samples_per_component();
    const auto& k = kernels::active();

    SpectralField ux(fine, 2), uz(fine, 2);
    transfer(sx, ux);
    transfer(sz, uz);

    // Physical factors: xi, zeta, and the four derivatives of zeta.
    AVec x1(nf), x2(nf), z1(nf), z2(nf), z1x(nf), z1y(nf), z2x(nf), z2y(nf);
    {
        CVec scratch(mf);
        auto deriv = [&](const double* fac, const cplx* src, double* out) {
            k.cderiv(fac, reinterpret_cast<const double*>(src),
                     reinterpret_cast<double*>(scratch.data()), mf);
            inverse_c(fine, scratch.data(), out);
        };
        deriv(tf.kx.data(), uz.component(0), z1x.data());
        deriv(tf.ky.data(), uz.component(0), z1y.data());
        deriv(tf.kx.data(), uz.component(1), z2x.data());
        deriv(tf.ky.data(), uz.component(1), z2y.data());
        std::copy(uz.component(0), uz.component(0) + mf, scratch.data());
        inverse_c(fine, scratch.data(), z1.data());
        std::copy(uz.component(1), uz.component(1) + mf, scratch.data());
        inverse_c(fine, scratch.data(), z2.data());
        inverse_c(fine, ux.component(0), x1.data());
        inverse_c(fine, ux.component(1), x2.data());
    }

    // Skew average: w_i = (xi . grad) zeta_i, r_ij = xi_j zeta_i, and the
    // spectral half-sum B_i = (w_i + i k_j r_ij) / 2.
    AVec w1(nf), w2(nf), r11(nf), r12(nf), r21(nf), r22(nf), tmp(nf);
    k.mul(x1.data(), z1x.data(), w1.data(), nf);
    k.mul(x2.data(), z1y.data(), tmp.data(), nf);
    k.axpy(1.0, tmp.data(), w1.data(), nf);
    k.mul(x1.data(), z2x.data(), w2.data(), nf);
    k.mul(x2.data(), z2y.data(), tmp.data(), nf);
    k.axpy(1.0, tmp.data(), w2.data(), nf);
    k.mul(x1.data(), z1.data(), r11.data(), nf);
    k.mul(x2.data(), z1.data(), r12.data(), nf);
    k.mul(x1.data(), z2.data(), r21.data(), nf);
    k.mul(x2.data(), z2.data(), r22.data(), nf);

    SpectralField acc(fine, 2);
    CVec plane(mf);
    auto add_plane = [&](const AVec& phys, int comp, const double* fac, double weight) {
        forward_c(fine, phys.data(), plane.data());
        if (fac == nullptr) {
            k.caxpy(weight, reinterpret_cast<const double*>(plane.data()),
                    reinterpret_cast<double*>(acc.component(comp)), mf);
        } else {
            CVec d(mf);
            k.cderiv(fac, reinterpret_cast<const double*>(plane.data()),
                     reinterpret_cast<double*>(d.data()), mf);
            k.caxpy(weight, reinterpret_cast<const double*>(d.data()),
                    reinterpret_cast<double*>(acc.component(comp)), mf);
        }
    };
    add_plane(w1, 0, nullptr, 0.5);
    add_plane(w2, 1, nullptr, 0.5);
    add_plane(r11, 0, tf.kx.data(), 0.5);
    add_plane(r12, 0, tf.ky.data(), 0.5);
    add_plane(r21, 1, tf.kx.data(), 0.5);
    add_plane(r22, 1, tf.ky.data(), 0.5);

    SpectralField out(base, 2);
    transfer(acc, out);
    project_spectral(out, tb);
    return inverse_velocity(std::move(out));
}

double trilinear(const VelocityField& xi, const VelocityField& zeta, const VelocityField& upsilon) {
    if (!xi.domain.same_grid(zeta.domain) || !xi.domain.same_grid(upsilon.domain))
        throw std::invalid_argument("trilinear: grid mismatch");
    const DomainSpec base = xi.domain;
    SpectralField sx = forward(xi);
    const WaveTable tb = make_wave_table(base);
    require_divergence_free(sx, tb, "trilinear");
    SpectralField sz = forward(zeta);
    SpectralField su = forward(upsilon);

    const DomainSpec fine = make_grid(3 * base.n / 2, base.L);
    const WaveTable tf = make_wave_table(fine);
    const std::size_t mf = spectral_size(fine.n);
    const std::size_t nf = fine.samples_per_component();
    const auto& k = kernels::active();

    SpectralField ux(fine, 2), uz(fine, 2), uu(fine, 2);
    transfer(sx, ux);
    transfer(sz, uz);
    transfer(su, uu);

    AVec x1(nf), x2(nf), v1(nf), v2(nf), z1x(nf), z1y(nf), z2x(nf), z2y(nf);
    {
        CVec scratch(mf);
        auto deriv = [&](const double* fac, const cplx* src, double* out) {
            k.cderiv(fac, reinterpret_cast<const double*>(src),
                     reinterpret_cast<double*>(scratch.data()), mf);
            inverse_c(fine, scratch.data(), out);
        };
        deriv(tf.kx.data(), uz.component(0), z1x.data());
        deriv(tf.ky.data(), uz.component(0), z1y.data());
        deriv(tf.kx.data(), uz.component(1), z2x.data());
        deriv(tf.ky.data(), uz.component(1), z2y.data());
        inverse_c(fine, ux.component(0), x1.data());
        inverse_c(fine, ux.component(1), x2.data());
        inverse_c(fine, uu.component(0), v1.data());
        inverse_c(fine, uu.component(1), v2.data());
    }

    AVec w(nf), tmp(nf);
    k.mul(x1.data(), z1x.data(), w.data(), nf);
    k.mul(x2.data(), z1y.data(), tmp.data(), nf);
    k.axpy(1.0, tmp.data(), w.data(), nf);
    const double s1 = k.dot(w.data(), v1.data(), nf);
    k.mul(x1.data(), z2x.data(), w.data(), nf);
    k.mul(x2.data(), z2y.data(), tmp.data(), nf);
    k.axpy(1.0, tmp.data(), w.data(), nf);
    const double s2 = k.dot(w.data(), v2.data(), nf);
    return (s1 + s2) * fine.cell_area();
}

VelocityField grade2_stress(const VelocityField& xi) {
    const DomainSpec base = xi.domain;
    SpectralField u = forward(xi);
    const WaveTable tb = make_wave_table(base);
    SpectralField e3(base, 3);
    strain_planes(u, tb, e3);

    const DomainSpec fine = make_grid(3 * base.n / 2, base.L);
    SpectralField ef(fine, 3);
    transfer(e3, ef);
    const std::size_t nf = fine.samples_per_component();
    AVec e11(nf), e12(nf), e22(nf), g11(nf), g12(nf), g22(nf);
    inverse_c(fine, ef.component(0), e11.data());
    inverse_c(fine, ef.component(1), e12.data());
    inverse_c(fine, ef.component(2), e22.data());
    kernels::active().strain_square(e11.data(), e12.data(), e22.data(), g11.data(), g12.data(),
                                    g22.data(), nf);
    return negative_projected_divergence(base, fine, g11, g12, g22);
}

VelocityField grade3_stress(const VelocityField& xi) {
    const DomainSpec base = xi.domain;
    SpectralField u = forward(xi);
    const WaveTable tb = make_wave_table(base);
    SpectralField e3(base, 3);
    strain_planes(u, tb, e3);

    const DomainSpec fine = make_grid(2 * base.n, base.L);
    SpectralField ef(fine, 3);
    transfer(e3, ef);
    const std::size_t nf = fine.samples_per_component();
    AVec e11(nf), e12(nf), e22(nf), t11(nf), t12(nf), t22(nf);
    inverse_c(fine, ef.component(0), e11.data());
    inverse_c(fine, ef.component(1), e12.data());
    inverse_c(fine, ef.component(2), e22.data());
    kernels::active().strain_cubic(e11.data(), e12.data(), e22.data(), t11.data(), t12.data(),
                                   t22.data(), nf);
    return negative_projected_divergence(base, fine, t11, t12, t22);
}

}  // namespace tgf
