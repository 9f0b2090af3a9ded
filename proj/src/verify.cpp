#include "tgf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tgf/fields.hpp"
#include "tgf/noise.hpp"
#include "tgf/norms.hpp"
#include "tgf/operators.hpp"
#include "tgf/spectral.hpp"

namespace tgf {
namespace {

constexpr std::uint64_t kStreamSuite = 9000;

/// Pointwise strain samples on the doubled grid, where quartic integrands
/// of band-limited fields are integrated exactly by the trapezoid rule.
struct StrainSamples {
    DomainSpec fine;
    AVec e11, e12, e22;

    double frob_sq(std::size_t i) const {
        return e11[i] * e11[i] + e22[i] * e22[i] + 2.0 * e12[i] * e12[i];
    }
};

StrainSamples strain_on_double_grid(const VelocityField& xi) {
    const DomainSpec& g = xi.domain;
    DomainSpec fine = make_grid(2 * g.n, g.L);
    TensorField e = strain(xi);

    SpectralField base(g, 3);
    forward_c(g, e.entry(0, 0), base.component(0));
    forward_c(g, e.entry(0, 1), base.component(1));
    forward_c(g, e.entry(1, 1), base.component(2));
    SpectralField up(fine, 3);
    transfer(base, up);

    std::size_t m = fine.samples_per_component();
    StrainSamples out{fine, AVec(m, 0.0), AVec(m, 0.0), AVec(m, 0.0)};
    inverse_c(fine, up.component(0), out.e11.data());
    inverse_c(fine, up.component(1), out.e12.data());
    inverse_c(fine, up.component(2), out.e22.data());
    return out;
}

VelocityField white_field(const DomainSpec& g, PathRng& rng) {
    VelocityField f(g);
    for (double& v : f.data) v = rng.normal();
    return f;
}

struct Worst {
    double residual = 0.0;
    void track(double r) { residual = std::max(residual, r); }
};

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

std::vector<IdentityCheck> operator_identity_suite(const DomainSpec& grid, int fields,
                                                   std::uint64_t seed) {
    if (fields < 1) throw std::invalid_argument("operator identity suite: fields must be >= 1");
    DomainSpec g = make_grid(grid.n, grid.L);
    int band_limit = g.n / 2 - 1;

    PathRng rng(seed, kStreamSuite);
    Worst stokes_dual, skew, antisym, cubic_dual, quad_degen, cubic_diff, quad_bound, idem,
        self_adj;

    for (int it = 0; it < fields; ++it) {
        int band = std::min(band_limit, 2 + static_cast<int>(rng.uniform() * 14.0));
        double decay = 1.0 + static_cast<double>(it % 3);
        VelocityField xi = rescale_l2(random_solenoidal(g, band, decay, rng), 1.0);
        VelocityField zeta = rescale_l2(random_solenoidal(g, band, decay, rng), 1.0);
        VelocityField ups = rescale_l2(random_solenoidal(g, band, decay, rng), 1.0);

        // Dissipative pairing matches the gradient seminorm.
        double h1sq = h1_seminorm(xi) * h1_seminorm(xi);
        stokes_dual.track(rel_gap(inner(xi, stokes(xi)), h1sq));

        // Skew-symmetric advection: zero self-pairing, antisymmetric pairing.
        double tri_scale =
            std::max(1e-300, norm_l2(xi) * h1_seminorm(zeta) * (norm_l2(zeta) + norm_l2(ups)));
        skew.track(std::abs(trilinear(xi, zeta, zeta)) / tri_scale);
        antisym.track(std::abs(trilinear(xi, zeta, ups) + trilinear(xi, ups, zeta)) / tri_scale);

        // Cubic stress against its closed-form dual: <xi, K(xi)> = 1/2 ||E||_4^4.
        double e4 = norm_lp(strain(xi), 4);
        double quartic = 0.5 * e4 * e4 * e4 * e4;
        cubic_dual.track(rel_gap(inner(xi, grade3_stress(xi)), quartic));

        // Quadratic stress pairing degenerates in two dimensions.
        quad_degen.track(std::abs(inner(xi, grade2_stress(xi))) / std::max(1e-300, e4 * e4 * e4));

        // Difference identity for the cubic stress, both sides by quadrature:
        //   2 <delta, K(z1) - K(z2)> = 1/2 int (|E1|^2 - |E2|^2)^2
        //                            + 1/2 int |E(delta)|^2 (|E1|^2 + |E2|^2).
        VelocityField delta = subtract(xi, zeta);
        VelocityField kdiff = subtract(grade3_stress(xi), grade3_stress(zeta));
        double lhs_cubic = 2.0 * inner(delta, kdiff);

        StrainSamples s1 = strain_on_double_grid(xi);
        StrainSamples s2 = strain_on_double_grid(zeta);
        StrainSamples sd = strain_on_double_grid(delta);
        double cell = s1.fine.cell_area();
        double q_split = 0.0, q_cross = 0.0, bound_rhs = 0.0;
        for (std::size_t i = 0; i < s1.e11.size(); ++i) {
            double m1 = s1.frob_sq(i), m2 = s2.frob_sq(i), md = sd.frob_sq(i);
            q_split += (m1 - m2) * (m1 - m2);
            q_cross += md * (m1 + m2);
            bound_rhs += md * (std::sqrt(m1) + std::sqrt(m2));
        }
        q_split *= cell;
        q_cross *= cell;
        bound_rhs *= cell;
        cubic_diff.track(rel_gap(lhs_cubic, 0.5 * (q_split + q_cross)));

        // Difference bound for the quadratic stress:
        //   |2 <delta, J(z1) - J(z2)>| <= int |E(delta)|^2 (|E1| + |E2|).
        VelocityField jdiff = subtract(grade2_stress(xi), grade2_stress(zeta));
        double lhs_quad = std::abs(2.0 * inner(delta, jdiff));
        quad_bound.track(std::max(0.0, (lhs_quad - bound_rhs) / std::max(bound_rhs, 1e-300)));

        // Projection: idempotent and self-adjoint on arbitrary fields.
        VelocityField w = white_field(g, rng);
        VelocityField v = white_field(g, rng);
        VelocityField pw = leray_project(w);
        idem.track(norm_l2(subtract(leray_project(pw), pw)) / std::max(1e-300, norm_l2(w)));
        self_adj.track(std::abs(inner(pw, v) - inner(w, leray_project(v))) /
                       std::max(1e-300, norm_l2(w) * norm_l2(v)));
    }

    auto row = [fields](const char* name, const Worst& w, double tol) {
        return IdentityCheck{name, w.residual, tol, fields, w.residual <= tol};
    };
    return {
        row("dissipative duality", stokes_dual, 1e-12),
        row("advection skew pairing", skew, 1e-12),
        row("advection antisymmetry", antisym, 1e-12),
        row("cubic stress duality", cubic_dual, 1e-10),
        row("quadratic stress degeneracy", quad_degen, 1e-10),
        row("cubic stress difference identity", cubic_diff, 1e-9),
        row("quadratic stress difference bound", quad_bound, 1e-9),
        row("projection idempotence", idem, 1e-13),
        row("projection self-adjointness", self_adj, 1e-13),
    };
}

bool all_pass(const std::vector<IdentityCheck>& report) {
    return std::all_of(report.begin(), report.end(),
                       [](const IdentityCheck& c) { return c.pass; });
}

}  // namespace tgf
