#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "tgf/engine.hpp"
#include "tgf/fields.hpp"
#include "tgf/grid.hpp"
#include "tgf/io.hpp"
#include "tgf/noise.hpp"
#include "tgf/norms.hpp"
#include "tgf/spectral.hpp"

using namespace tgf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RunConfig base_config() {
    RunConfig cfg;
    cfg.grid = make_grid(64, kTwoPi);
    cfg.fluid = FluidParams{1.0, 0.3, 1.0};
    cfg.noise.kind = NoiseKind::Additive;
    cfg.noise.k_max = 1;
    cfg.noise.sigma0 = 0.0;
    cfg.init_truth.preset = InitPreset::Mode;
    cfg.init_truth.kx = 0;
    cfg.init_truth.ky = 1;
    cfg.init_truth.amplitude = 0.1;
    cfg.init_truth.sine_phase = true;
    cfg.dt = 1e-3;
    cfg.T = 0.05;
    cfg.cadence = 0.01;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("configuration validation names the broken knob") {
    RunConfig cfg = base_config();
    validate_config(cfg);

    RunConfig bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.T = 1e-9;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.cadence = 0.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.cda.kappa = -1.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.cda.kappa = 2.0;
    bad.cda.interpolant = {InterpolantKind::FourierModes, 0.0};
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.cda.kappa = 600.0;
    bad.cda.interpolant = {InterpolantKind::VolumeElement, kTwoPi / 8.0};
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.init_truth.preset = InitPreset::RandomBand;
    bad.init_truth.band = 40;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.fluid.alpha = 2.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
}

TEST_CASE("initial presets build the advertised states") {
    RunConfig cfg = base_config();
    const VelocityField truth = initial_field(cfg, false);
    const VelocityField ref = mode_field(cfg.grid, 0, 1, 0.1, true);
    CHECK(norm_l2(truth - ref) <= 1e-12 * norm_l2(ref));

    cfg.init_assim.preset = InitPreset::Zero;
    CHECK(norm_l2(initial_field(cfg, true)) == 0.0);

    cfg.init_assim.preset = InitPreset::Mode;
    cfg.init_assim.kx = 1;
    cfg.init_assim.ky = 1;
    cfg.init_assim.amplitude = 0.2;
    cfg.init_assim.offset_from_truth = true;
    const VelocityField shifted = initial_field(cfg, true);
    const VelocityField expect = ref + mode_field(cfg.grid, 1, 1, 0.2, true);
    CHECK(norm_l2(shifted - expect) <= 1e-12 * norm_l2(expect));

    cfg.init_truth.preset = InitPreset::RandomBand;
    cfg.init_truth.band = 6;
    cfg.init_truth.decay = 2.0;
    cfg.init_truth.amplitude = 0.37;
    const VelocityField rnd = initial_field(cfg, false);
    CHECK(norm_l2(rnd) == doctest::Approx(0.37).epsilon(1e-12));

    const auto dir = std::filesystem::temp_directory_path() / "tgf_unit_engine";
    std::filesystem::create_directories(dir);
    const std::string snap = (dir / "init.bin").string();
    write_snapshot(snap, rnd);
    cfg.init_assim.preset = InitPreset::Snapshot;
    cfg.init_assim.snapshot_path = snap;
    cfg.init_assim.offset_from_truth = false;
    const VelocityField loaded = initial_field(cfg, true);
    CHECK(norm_l2(loaded - rnd) <= 1e-13 * norm_l2(rnd));

    const VelocityField wrong_grid = mode_field(make_grid(32, kTwoPi), 0, 1, 0.1, true);
    write_snapshot(snap, wrong_grid);
    CHECK_THROWS_AS(initial_field(cfg, true), std::invalid_argument);
}

TEST_CASE("one deterministic step matches the closed-form update") {
    RunConfig cfg = base_config();
    const double A = 0.1, dt = cfg.dt, nu = cfg.fluid.nu, beta = cfg.fluid.beta;
    const VelocityField state = initial_field(cfg, false);
    const VelocityField dW(cfg.grid);
    const VelocityField next = step_truth(state, cfg, dW);

    SpectralField s = forward(next);
    const std::size_t cols = spectral_cols(cfg.grid.n);
    // Row iy holds wavenumber ky at column kx = 0; sin modes live in the
    // negative imaginary part.
    const cplx c1 = s.component(0)[1 * cols + 0];
    const cplx c3 = s.component(0)[3 * cols + 0];
    const double a1 = -2.0 * c1.imag();
    const double a3 = -2.0 * c3.imag();
    const double expect1 = (A - 1.5 * beta * A * A * A * dt) / (1.0 + nu * dt);
    const double expect3 = -1.5 * beta * A * A * A * dt / (1.0 + 9.0 * nu * dt);
    CHECK(std::abs(c1.real()) <= 1e-14);
    CHECK(a1 == doctest::Approx(expect1).epsilon(1e-10));
    CHECK(a3 == doctest::Approx(expect3).epsilon(1e-10));
}

TEST_CASE("a balanced forcing preset holds the truth at a fixed point") {
    RunConfig cfg = base_config();
    cfg.fluid = FluidParams{1.0, 0.2, 1.0};
    cfg.forcing.preset = ForcingPreset::SteadyBalance;
    cfg.forcing.kx = 1;
    cfg.forcing.ky = 1;
    cfg.forcing.amplitude = 0.3;
    cfg.forcing.sine_phase = true;
    cfg.init_truth.kx = 1;
    cfg.init_truth.ky = 1;
    cfg.init_truth.amplitude = 0.3;
    cfg.init_truth.sine_phase = true;
    const auto recs = run_truth(cfg);
    REQUIRE(recs.size() >= 3);
    for (const auto& r : recs)
        CHECK(r.e_truth == doctest::Approx(recs.front().e_truth).epsilon(1e-12));
}

TEST_CASE("record bookkeeping matches the state norms") {
    RunConfig cfg = base_config();
    cfg.noise.sigma0 = 1e-2;
    const auto recs = run_truth(cfg);
    REQUIRE(recs.size() == 6);
    CHECK(recs.front().t == 0.0);
    CHECK(recs.back().t == doctest::Approx(0.05).epsilon(1e-12));
    const VelocityField u0 = initial_field(cfg, false);
    CHECK(recs.front().e_truth == doctest::Approx(norm_l2(u0) * norm_l2(u0)).epsilon(1e-12));
    const TensorField E = strain(u0);
    CHECK(recs.front().strain_l4_4 ==
          doctest::Approx(std::pow(norm_lp(E, 4), 4)).epsilon(1e-10));
    CHECK(recs.front().grad_sq ==
          doctest::Approx(h1_seminorm(u0) * h1_seminorm(u0)).epsilon(1e-10));
    CHECK(recs.front().accum == 0.0);
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].accum >= recs[i - 1].accum);
}

TEST_CASE("the assimilated twin with kappa zero shadows the free run") {
    RunConfig cfg = base_config();
    cfg.noise.sigma0 = 1e-2;
    cfg.cda.kappa = 0.0;
    cfg.init_assim.preset = InitPreset::Mode;
    cfg.init_assim.kx = 1;
    cfg.init_assim.ky = 1;
    cfg.init_assim.amplitude = 0.05;
    const auto twin = run_twin(cfg);
    const auto solo = run_truth(cfg);
    REQUIRE(twin.size() == solo.size());
    for (std::size_t i = 0; i < twin.size(); ++i) {
        CHECK(twin[i].e_truth == solo[i].e_truth);
        CHECK(twin[i].err_sq > 0.0);
    }
}

TEST_CASE("a twin started on the truth stays on the truth") {
    RunConfig cfg = base_config();
    cfg.noise.sigma0 = 1e-2;
    cfg.cda.kappa = 2.0;
    cfg.cda.interpolant = {InterpolantKind::FourierModes, 0.7};
    cfg.init_assim = cfg.init_truth;
    const auto recs = run_twin(cfg);
    for (const auto& r : recs) CHECK(r.err_sq <= 1e-24 * std::max(1.0, r.e_truth));
}

TEST_CASE("unforced deterministic energy decays monotonically") {
    RunConfig cfg = base_config();
    cfg.init_truth.preset = InitPreset::RandomBand;
    cfg.init_truth.band = 6;
    cfg.init_truth.decay = 2.0;
    cfg.init_truth.amplitude = 1.0;
    const auto recs = run_truth(cfg);
    for (std::size_t i = 1; i < recs.size(); ++i)
        CHECK(recs[i].e_truth <= recs[i - 1].e_truth * (1.0 + 1e-14));
}

TEST_CASE("twin runs are reproducible") {
    RunConfig cfg = base_config();
    cfg.noise.sigma0 = 5e-3;
    cfg.cda.kappa = 1.0;
    cfg.cda.interpolant = {InterpolantKind::FourierModes, 0.7};
    cfg.init_assim.preset = InitPreset::Mode;
    cfg.init_assim.kx = 1;
    cfg.init_assim.ky = 0;
    cfg.init_assim.amplitude = 0.02;
    cfg.init_assim.offset_from_truth = true;
    const auto a = run_twin(cfg);
    const auto b = run_twin(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].err_sq == b[i].err_sq);
        CHECK(a[i].e_truth == b[i].e_truth);
        CHECK(a[i].e_assim == b[i].e_assim);
        CHECK(a[i].accum == b[i].accum);
    }
}

TEST_CASE("monte carlo aggregates match the single-path runner") {
    RunConfig cfg = base_config();
    cfg.grid = make_grid(32, kTwoPi);
    cfg.noise.sigma0 = 1e-2;
    cfg.cda.kappa = 2.0;
    cfg.cda.interpolant = {InterpolantKind::FourierModes, 0.7};
    cfg.init_assim.preset = InitPreset::Mode;
    cfg.init_assim.kx = 1;
    cfg.init_assim.ky = 1;
    cfg.init_assim.amplitude = 0.05;
    cfg.init_assim.offset_from_truth = true;

    const McResult mc = run_monte_carlo(cfg, 3);
    CHECK(mc.paths_requested == 3);
    CHECK(mc.paths_used == 3);
    CHECK(mc.excluded_paths.empty());
    REQUIRE(mc.path_err_sq.size() == 3);
    REQUIRE(mc.t.size() == 6);

    const auto single = run_twin(cfg);
    REQUIRE(single.size() == mc.t.size());
    for (std::size_t i = 0; i < single.size(); ++i) {
        CHECK(mc.path_err_sq[0][i] == single[i].err_sq);
        CHECK(mc.t[i] == single[i].t);
        CHECK(mc.stderr_err_sq[i] >= 0.0);
        CHECK(mc.mean_truth_e4[i] > 0.0);
    }

    // Means are plain averages of the per-path series.
    for (std::size_t i = 0; i < mc.t.size(); ++i) {
        double m = 0.0;
        for (int p = 0; p < 3; ++p) m += mc.path_err_sq[p][i];
        m /= 3.0;
        CHECK(mc.mean_err_sq[i] == doctest::Approx(m).epsilon(1e-14));
    }

    CHECK_THROWS_AS(run_monte_carlo(cfg, 0), std::invalid_argument);
}

TEST_CASE("the worker pool size does not change results") {
    RunConfig cfg = base_config();
    cfg.grid = make_grid(32, kTwoPi);
    cfg.noise.sigma0 = 1e-2;
    cfg.cda.kappa = 1.0;
    cfg.cda.interpolant = {InterpolantKind::FourierModes, 0.7};
    cfg.init_assim.preset = InitPreset::Mode;
    cfg.init_assim.kx = 0;
    cfg.init_assim.ky = 2;
    cfg.init_assim.amplitude = 0.05;
    cfg.init_assim.offset_from_truth = true;

    setenv("TGF_CDA_THREADS", "1", 1);
    const McResult serial = run_monte_carlo(cfg, 4);
    setenv("TGF_CDA_THREADS", "4", 1);
    const McResult pooled = run_monte_carlo(cfg, 4);
    unsetenv("TGF_CDA_THREADS");
    REQUIRE(serial.t.size() == pooled.t.size());
    for (std::size_t i = 0; i < serial.t.size(); ++i) {
        CHECK(serial.mean_err_sq[i] == pooled.mean_err_sq[i]);
        CHECK(serial.mean_truth_e4[i] == pooled.mean_truth_e4[i]);
    }
}

TEST_CASE("unstable runs raise a blow-up report with partial records") {
    RunConfig cfg = base_config();
    cfg.grid = make_grid(32, kTwoPi);
    cfg.dt = 0.2;
    cfg.T = 1.0;
    cfg.cadence = 0.2;
    cfg.init_truth.amplitude = 30.0;
    try {
        run_truth(cfg);
        FAIL("expected the stability guard to trip");
    } catch (const BlowUpError& e) {
        CHECK(e.partial().size() >= 1);
        CHECK(std::string(e.what()).find("guard") != std::string::npos);
    }
    CHECK_THROWS_AS(run_monte_carlo(cfg, 2), std::runtime_error);
}

TEST_CASE("effective roughness honors overrides") {
    RunConfig cfg = base_config();
    const double measured = effective_nd_hat(cfg);
    CHECK(measured > 0.0);
    CHECK(measured == effective_nd_hat(cfg));
    cfg.constants.nd_hat = 0.8;
    CHECK(effective_nd_hat(cfg) == 0.8);
}

}  // TEST_SUITE
