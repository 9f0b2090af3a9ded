#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "tgf/fields.hpp"
#include "tgf/grid.hpp"
#include "tgf/interpolant.hpp"
#include "tgf/noise.hpp"
#include "tgf/norms.hpp"
#include "tgf/spectral.hpp"

using namespace tgf;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_SUITE("interpolant") {

TEST_CASE("volume cell count snaps to the nearest divisor") {
    const DomainSpec g = make_grid(64, kTwoPi);
    CHECK(volume_cells({InterpolantKind::VolumeElement, g.L / 8.0}, g) == 8);
    CHECK(volume_cells({InterpolantKind::VolumeElement, g.L / 7.0}, g) == 8);
    CHECK(volume_cells({InterpolantKind::VolumeElement, g.L / 3.0}, g) == 4);
    CHECK(volume_cells({InterpolantKind::VolumeElement, g.L / 63.0}, g) == 64);
    CHECK_THROWS_AS(volume_cells({InterpolantKind::VolumeElement, g.L}, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(volume_cells({InterpolantKind::VolumeElement, g.L / 200.0}, g),
                    std::invalid_argument);
}

TEST_CASE("cell averaging is an exact orthogonal projection") {
    const DomainSpec g = make_grid(64, kTwoPi);
    const InterpolantSpec spec{InterpolantKind::VolumeElement, g.L / 8.0};
    PathRng rng(41, 0);
    const VelocityField f = random_solenoidal(g, 14, 1.5, rng);
    const VelocityField rf = volume_element(f, spec);

    // Cells of 8x8 samples make the block means exact dyadic operations,
    // so a second pass reproduces the first bit for bit.
    const VelocityField rrf = volume_element(rf, spec);
    for (std::size_t i = 0; i < rf.data.size(); ++i) CHECK(rrf.data[i] == rf.data[i]);

    // Orthogonality of the residual against the range.
    CHECK(std::abs(inner(f - rf, rf)) <= 1e-12 * norm_l2(f) * norm_l2(f));

    // Linearity.
    const VelocityField h = random_solenoidal(g, 14, 1.5, rng);
    const VelocityField lhs = volume_element(f + h, spec);
    const VelocityField rhs = volume_element(f, spec) + volume_element(h, spec);
    CHECK(norm_l2(lhs - rhs) <= 1e-12 * (norm_l2(f) + norm_l2(h)));

    // A mean-zero field keeps a mean-zero average.
    double mean0 = 0.0;
    for (std::size_t i = 0; i < g.samples_per_component(); ++i) mean0 += rf.data[i];
    CHECK(std::abs(mean0 / g.samples_per_component()) <= 1e-12 * norm_l2(f));
}

TEST_CASE("cell averaging resolves smooth fields at the stated scale") {
    const DomainSpec g = make_grid(64, kTwoPi);
    const InterpolantSpec spec{InterpolantKind::VolumeElement, g.L / 8.0};
    PathRng rng(42, 0);
    for (int it = 0; it < 10; ++it) {
        const VelocityField f = random_solenoidal(g, 3, 2.5, rng);
        const VelocityField res = f - volume_element(f, spec);
        const double num = norm_l2(res) * norm_l2(res);
        const double l2 = norm_l2(f), h1 = h1_seminorm(f);
        const double den = spec.varpi * spec.varpi * (l2 * l2 + h1 * h1);
        CHECK(num <= 0.25 * den);
    }
}

TEST_CASE("spectral cutoff keeps low modes and drops high ones") {
    const DomainSpec g = make_grid(64, kTwoPi);
    const InterpolantSpec spec{InterpolantKind::FourierModes, 0.7};
    // 1/varpi^2 is about 2.04, so |k|^2 in {1, 2} passes and 4 does not.
    const VelocityField low = mode_field(g, 1, 1, 0.9, true);
    CHECK(norm_l2(fourier_modes(low, spec) - low) <= 1e-12 * norm_l2(low));
    const VelocityField high = mode_field(g, 2, 0, 0.9, true);
    CHECK(norm_l2(fourier_modes(high, spec)) <= 1e-12 * norm_l2(high));

    PathRng rng(43, 0);
    const VelocityField f = random_solenoidal(g, 14, 1.5, rng);
    const VelocityField rf = fourier_modes(f, spec);
    const VelocityField rrf = fourier_modes(rf, spec);
    CHECK(norm_l2(rrf - rf) <= 1e-12 * norm_l2(f));

    // Pythagoras under the orthogonal splitting.
    const double a = norm_l2(f) * norm_l2(f);
    const double b = norm_l2(rf) * norm_l2(rf) + norm_l2(f - rf) * norm_l2(f - rf);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));

    // observe() routes to the configured kind.
    const VelocityField via = observe(f, spec);
    CHECK(norm_l2(via - rf) <= 1e-13 * norm_l2(f));
}

TEST_CASE("smoothness certificates stay below the design ratio") {
    const DomainSpec g = make_grid(64, kTwoPi);
    PathRng rng(44, 0);
    const InterpolantSpec spec{InterpolantKind::FourierModes, 0.7};
    const C0Certificate cert = estimate_c0(spec, g, 100, rng);
    CHECK(cert.c0_hat <= 1.05);
    // The worst single mode just above the cutoff gives 1/(varpi^2 (1 + 4)).
    CHECK(cert.c0_hat >= 1.0 / (0.7 * 0.7 * 5.0) * (1.0 - 1e-9));
    CHECK(cert.ensemble_size >= 100);

    PathRng rng2(44, 0);
    const C0Certificate again = estimate_c0(spec, g, 100, rng2);
    CHECK(again.c0_hat == cert.c0_hat);

    const InterpolantSpec ve{InterpolantKind::VolumeElement, g.L / 8.0};
    const C0Certificate vc = estimate_c0(ve, g, 100, rng);
    CHECK(vc.c0_hat > 0.0);
    CHECK(vc.c0_hat <= 1.05);

    CHECK_THROWS_AS(estimate_c0(spec, g, 10, rng), std::invalid_argument);

    const std::string j = to_json(cert);
    CHECK(j.find("c0_hat") != std::string::npos);
}

}  // TEST_SUITE
