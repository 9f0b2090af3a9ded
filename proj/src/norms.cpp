#include "tgf/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "tgf/kernels.hpp"
#include "tgf/spectral.hpp"

namespace tgf {
namespace {

// Shared quartic path: move the component spectra onto a doubled grid so
// the pointwise fourth power of the magnitude is integrated exactly, then
// reduce with the fused kernel. For velocities the two components enter as
// the diagonal of a virtual tensor with zero off-diagonal plane, which
// makes (u1^2 + u2^2)^2 reuse the strain reduction.
double quartic_integral_2comp(const SpectralField& s) {
    const DomainSpec fine = make_grid(2 * s.domain.n, s.domain.L);
    SpectralField up(fine, 2);
    transfer(s, up);
    VelocityField phys(fine);
    for (int c = 0; c < 2; ++c) inverse_c(fine, up.component(c), phys.component(c));
    AVec zero(fine.samples_per_component(), 0.0);
    const double q = kernels::active().strain_quartic_sum(
        phys.component(0), zero.data(), phys.component(1), fine.samples_per_component());
    return q * fine.cell_area();
}

double quartic_integral_sym_tensor(const SpectralField& s3) {
    const DomainSpec fine = make_grid(2 * s3.domain.n, s3.domain.L);
    SpectralField up(fine, 3);
    transfer(s3, up);
    AVec e11(fine.samples_per_component());
    AVec e12(fine.samples_per_component());
    AVec e22(fine.samples_per_component());
    inverse_c(fine, up.component(0), e11.data());
    inverse_c(fine, up.component(1), e12.data());
    inverse_c(fine, up.component(2), e22.data());
    const double q = kernels::active().strain_quartic_sum(e11.data(), e12.data(), e22.data(),
                                                          fine.samples_per_component());
    return q * fine.cell_area();
}

}  // namespace

double norm_l2(const VelocityField& f) {
    const double s = kernels::active().sumsq(f.data.data(), f.data.size());
    return std::sqrt(s * f.domain.cell_area());
}

double norm_lp(const VelocityField& f, int p) {
    if (p == 2) return norm_l2(f);
    if (p != 4) throw std::invalid_argument("norm_lp: only p = 2 and p = 4 are supported");
    return std::pow(quartic_integral_2comp(forward(f)), 0.25);
}

double norm_lp(const TensorField& f, int p) {
    if (p == 2) {
        const double s = kernels::active().sumsq(f.data.data(), f.data.size());
        return std::sqrt(s * f.domain.cell_area());
    }
    if (p != 4) throw std::invalid_argument("norm_lp: only p = 2 and p = 4 are supported");
    if (f.symmetric) {
        SpectralField s3(f.domain, 3);
        forward_c(f.domain, f.entry(0, 0), s3.component(0));
        forward_c(f.domain, f.entry(0, 1), s3.component(1));
        forward_c(f.domain, f.entry(1, 1), s3.component(2));
        return std::pow(quartic_integral_sym_tensor(s3), 0.25);
    }
    // General tensor: exact quadrature of (sum_ij t_ij^2)^2 on the doubled grid.
    const DomainSpec fine = make_grid(2 * f.domain.n, f.domain.L);
    SpectralField coarse = forward(f);
    SpectralField up(fine, coarse.comps);
    transfer(coarse, up);
    const std::size_t m = fine.samples_per_component();
    std::vector<AVec> planes(up.comps, AVec(m));
    for (int c = 0; c < up.comps; ++c) inverse_c(fine, up.component(c), planes[c].data());
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
        double mag2 = 0.0;
        for (int c = 0; c < up.comps; ++c) mag2 += planes[c][i] * planes[c][i];
        acc[i & 3] += mag2 * mag2;
    }
    const double q = ((acc[0] + acc[1]) + (acc[2] + acc[3])) * fine.cell_area();
    return std::pow(q, 0.25);
}

double inner(const VelocityField& f, const VelocityField& g) {
    if (!f.domain.same_grid(g.domain)) throw std::invalid_argument("inner: grid mismatch");
    const double s = kernels::active().dot(f.data.data(), g.data.data(), f.data.size());
    return s * f.domain.cell_area();
}

double h1_seminorm(const VelocityField& f) {
    const SpectralField s = forward(f);
    const WaveTable t = make_wave_table(f.domain);
    return std::sqrt(f.domain.area * plancherel_weighted_sumsq(s, t.k2.data()));
}

double dual_norm(const VelocityField& f) {
    const SpectralField s = forward(f);
    const cplx m0 = s.component(0)[0];
    const cplx m1 = s.component(1)[0];
    const double mean_l2 = std::sqrt(f.domain.area * (std::norm(m0) + std::norm(m1)));
    const double l2 = std::sqrt(f.domain.area * plancherel_sumsq(s));
    if (mean_l2 > 1e-10 * l2)
        throw std::invalid_argument("dual_norm: field has a nonzero mean, project it first");
    const WaveTable t = make_wave_table(f.domain);
    const int cols = spectral_cols(f.domain.n);
    double total = 0.0;
    for (int c = 0; c < 2; ++c) {
        const cplx* z = s.component(c);
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t idx = 0; idx < spectral_size(f.domain.n); ++idx) {
            if (t.k2[idx] == 0.0) continue;
            const double w = (idx % cols == 0) ? 1.0 : 2.0;
            acc[idx & 3] += w * std::norm(z[idx]) / t.k2[idx];
        }
        total += (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    return std::sqrt(f.domain.area * total);
}

}  // namespace tgf
