#include "tgf/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tgf/analysis.hpp"
#include "tgf/fields.hpp"
#include "tgf/io.hpp"
#include "tgf/kernels.hpp"
#include "tgf/spectral.hpp"

namespace tgf {
namespace {

// Fixed auxiliary RNG streams. Wiener paths use the path index itself
// (0, 1, 2, ...), so these sit far outside any realistic path count.
constexpr std::uint64_t kStreamTruthInit = (1ULL << 40);
constexpr std::uint64_t kStreamAssimInit = (1ULL << 40) + 1;
constexpr std::uint64_t kStreamEmbedding = (1ULL << 40) + 2;

double* dptr(SpectralField& s) { return reinterpret_cast<double*>(s.data.data()); }
const double* dptr(const SpectralField& s) {
    return reinterpret_cast<const double*>(s.data.data());
}
double* dptr(SpectralField& s, int c) { return reinterpret_cast<double*>(s.component(c)); }
const double* dptr(const SpectralField& s, int c) {
    return reinterpret_cast<const double*>(s.component(c));
}

void zero(SpectralField& s) { std::fill(s.data.begin(), s.data.end(), cplx{0.0, 0.0}); }

void copy_field(const SpectralField& src, SpectralField& dst) {
    std::copy(src.data.begin(), src.data.end(), dst.data.begin());
}

// Preallocated grids, tables, and scratch for one trajectory. Quadratic
// products live on the 3/2-padded grid and cubic products on the doubled
// grid, so every nonlinear term is alias-free on the retained band.
struct Workspace {
    RunConfig cfg;
    DomainSpec base, fine1, fine2;
    WaveTable wb, w1, w2;
    NoiseModel model;
    NoiseCoefficient coeff;

    double dt = 0.0;
    double kappa = 0.0;
    bool spectral_nudging = true;
    bool has_forcing = false;

    AVec inv_plain;   // 1 / (1 + nu k^2 dt)
    AVec inv_nudged;  // same with + kappa dt on observed modes
    AVec nudge_gain;  // kappa dt on observed modes, else 0
    AVec kx2b, ky2b;  // 2 k factor tables on the base grid (strain planes)
    AVec kxh1, kyh1;  // k/2 factor tables on the padded grid (skew form)

    SpectralField forcing;

    SpectralField drift, noise_inc, scratch2, dW, truth_old;  // base, 2 comps
    SpectralField strain_b;                                   // base, 3 planes
    SpectralField u_f1, b_f1;                                 // fine1, 2
    SpectralField deriv_f1;                                   // fine1, 4
    SpectralField strain_f2;                                  // fine2, 3
    SpectralField div_f2;                                     // fine2, 2
    AVec p1;  // fine1 physical scratch, 11 planes
    AVec p2;  // fine2 physical scratch, 6 planes
    AVec pb;  // base physical scratch, 2 planes

    explicit Workspace(const RunConfig& c);

    double* p1_plane(int i) { return p1.data() + static_cast<std::size_t>(i) * fine1.samples_per_component(); }
    double* p2_plane(int i) { return p2.data() + static_cast<std::size_t>(i) * fine2.samples_per_component(); }
    double* pb_plane(int i) { return pb.data() + static_cast<std::size_t>(i) * base.samples_per_component(); }
};

SpectralField initial_spectral(Workspace& ws, bool assimilated);
void eval_drift(Workspace& ws, const SpectralField& u, SpectralField& out, double& quartic);

void build_forcing(Workspace& ws) {
    zero(ws.forcing);
    const ForcingSettings& f = ws.cfg.forcing;
    switch (f.preset) {
        case ForcingPreset::None:
            return;
        case ForcingPreset::SingleMode:
            add_mode_spectral(ws.forcing, f.kx, f.ky, f.amplitude, f.sine_phase);
            return;
        case ForcingPreset::SteadyBalance: {
            // Forcing that makes the truth initial condition an exact fixed
            // point of the deterministic semi-implicit step: with
            // h = nu k^2 u0 - drift(u0) the update returns u0 identically.
            SpectralField u0 = initial_spectral(ws, false);
            double q = 0.0;
            eval_drift(ws, u0, ws.drift, q);
            const std::size_t sz = spectral_size(ws.base.n);
            for (int c = 0; c < 2; ++c) {
                cplx* out = ws.forcing.component(c);
                const cplx* u = u0.component(c);
                const cplx* d = ws.drift.component(c);
                for (std::size_t i = 0; i < sz; ++i)
                    out[i] = ws.cfg.fluid.nu * ws.wb.k2[i] * u[i] - d[i];
            }
            return;
        }
    }
}

Workspace::Workspace(const RunConfig& c) : cfg(c) {
    validate_config(c);
    base = make_grid(c.grid.n, c.grid.L);
    fine1 = make_grid(3 * c.grid.n / 2, c.grid.L);
    fine2 = make_grid(2 * c.grid.n, c.grid.L);
    wb = make_wave_table(base);
    w1 = make_wave_table(fine1);
    w2 = make_wave_table(fine2);
    model = build_noise(c.noise.k_max, c.noise.a, c.noise.s, base);
    coeff = make_coefficient(c.noise.kind, c.noise.sigma0, c.noise.sigma1);

    dt = c.dt;
    kappa = c.cda.kappa;
    spectral_nudging = c.cda.interpolant.kind == InterpolantKind::FourierModes;
    has_forcing = c.forcing.preset != ForcingPreset::None;

    const std::size_t szb = spectral_size(base.n);
    inv_plain.resize(szb);
    inv_nudged.resize(szb);
    nudge_gain.resize(szb);
    const double varpi = c.cda.interpolant.varpi;
    const double cutoff2 = (spectral_nudging && kappa > 0.0 && varpi > 0.0)
                               ? 1.0 / (varpi * varpi)
                               : -1.0;
    for (std::size_t i = 0; i < szb; ++i) {
        const double plain = 1.0 + c.fluid.nu * wb.k2[i] * dt;
        const bool observed = cutoff2 > 0.0 && wb.k2[i] <= cutoff2;
        inv_plain[i] = 1.0 / plain;
        nudge_gain[i] = observed ? kappa * dt : 0.0;
        inv_nudged[i] = 1.0 / (plain + nudge_gain[i]);
    }

    const std::size_t sz1 = spectral_size(fine1.n);
    kx2b.resize(szb);
    ky2b.resize(szb);
    kxh1.resize(sz1);
    kyh1.resize(sz1);
    for (std::size_t i = 0; i < szb; ++i) {
        kx2b[i] = 2.0 * wb.kx[i];
        ky2b[i] = 2.0 * wb.ky[i];
    }
    for (std::size_t i = 0; i < sz1; ++i) {
        kxh1[i] = 0.5 * w1.kx[i];
        kyh1[i] = 0.5 * w1.ky[i];
    }

    forcing = SpectralField(base, 2);
    drift = SpectralField(base, 2);
    noise_inc = SpectralField(base, 2);
    scratch2 = SpectralField(base, 2);
    dW = SpectralField(base, 2);
    truth_old = SpectralField(base, 2);
    strain_b = SpectralField(base, 3);
    u_f1 = SpectralField(fine1, 2);
    b_f1 = SpectralField(fine1, 2);
    deriv_f1 = SpectralField(fine1, 4);
    strain_f2 = SpectralField(fine2, 3);
    div_f2 = SpectralField(fine2, 2);
    p1.assign(11 * fine1.samples_per_component(), 0.0);
    p2.assign(6 * fine2.samples_per_component(), 0.0);
    pb.assign(2 * base.samples_per_component(), 0.0);

    build_forcing(*this);
}

void build_initial_preset(Workspace& ws, const InitialSettings& init, bool assimilated,
                          SpectralField& s) {
    switch (init.preset) {
        case InitPreset::Zero:
            return;
        case InitPreset::Mode:
            add_mode_spectral(s, init.kx, init.ky, init.amplitude, init.sine_phase);
            return;
        case InitPreset::RandomBand: {
            PathRng rng(ws.cfg.seed, assimilated ? kStreamAssimInit : kStreamTruthInit);
            random_solenoidal_spectral(s, init.band, init.decay, rng);
            const double cur = std::sqrt(ws.base.area * plancherel_sumsq(s));
            if (!(cur > 0.0))
                throw std::runtime_error("initial condition: random band field is degenerate");
            kernels::active().scale(init.amplitude / cur, dptr(s), 2 * s.data.size());
            return;
        }
        case InitPreset::Snapshot: {
            const VelocityField f = read_snapshot(init.snapshot_path);
            if (!f.domain.same_grid(ws.base))
                throw std::invalid_argument(
                    "initial condition: snapshot grid does not match the configuration");
            s = forward(f);
            return;
        }
    }
}

SpectralField initial_spectral(Workspace& ws, bool assimilated) {
    const InitialSettings& init = assimilated ? ws.cfg.init_assim : ws.cfg.init_truth;
    SpectralField s(ws.base, 2);
    build_initial_preset(ws, init, assimilated, s);
    if (assimilated && init.offset_from_truth) {
        SpectralField t = initial_spectral(ws, false);
        kernels::active().caxpy(1.0, dptr(t), dptr(s), s.data.size());
    }
    project_spectral(s, ws.wb);
    return s;
}

// Fills p2 planes 0..2 with the physical strain components of u on the
// doubled grid (e11, e12, e22 of E = grad u + (grad u)^T).
void strain_to_fine(Workspace& ws, const SpectralField& u) {
    const auto& k = kernels::active();
    const std::size_t szb = spectral_size(ws.base.n);
    k.cderiv(ws.kx2b.data(), dptr(u, 0), dptr(ws.strain_b, 0), szb);
    k.cderiv(ws.wb.ky.data(), dptr(u, 0), dptr(ws.strain_b, 1), szb);
    k.cderiv_acc(ws.wb.kx.data(), dptr(u, 1), dptr(ws.strain_b, 1), szb);
    k.cderiv(ws.ky2b.data(), dptr(u, 1), dptr(ws.strain_b, 2), szb);
    transfer(ws.strain_b, ws.strain_f2);
    for (int p = 0; p < 3; ++p)
        inverse_c(ws.fine2, ws.strain_f2.component(p), ws.p2_plane(p));
}

double quartic_of(Workspace& ws, const SpectralField& u) {
    strain_to_fine(ws, u);
    return kernels::active().strain_quartic_sum(ws.p2_plane(0), ws.p2_plane(1), ws.p2_plane(2),
                                                ws.fine2.samples_per_component()) *
           ws.fine2.cell_area();
}

// Explicit part of the momentum drift at state u: skew-form self-advection
// plus the cubic stress plus forcing (the dissipative term is handled by
// the implicit divide, the solenoidal projection once after the update).
// Also reads off ||E(u)||_4^4 from the strain planes already in hand.
//
// The quadratic stress is omitted: in two dimensions the matrix square of
// the trace-free symmetric strain is a multiple of the identity, so its
// divergence is a gradient and the projection annihilates it exactly.
void eval_drift(Workspace& ws, const SpectralField& u, SpectralField& out, double& quartic) {
    const auto& k = kernels::active();
    const std::size_t szb = spectral_size(ws.base.n);
    const std::size_t sz1 = spectral_size(ws.fine1.n);
    const std::size_t n1 = ws.fine1.samples_per_component();
    const std::size_t n2 = ws.fine2.samples_per_component();

    // Self-advection in the skew average form on the 3/2 grid:
    // B_i = (w_i + i k_j q_ij) / 2 with w = (u.grad)u and q = u (x) u.
    transfer(u, ws.u_f1);
    k.cderiv(ws.w1.kx.data(), dptr(ws.u_f1, 0), dptr(ws.deriv_f1, 0), sz1);
    k.cderiv(ws.w1.ky.data(), dptr(ws.u_f1, 0), dptr(ws.deriv_f1, 1), sz1);
    k.cderiv(ws.w1.kx.data(), dptr(ws.u_f1, 1), dptr(ws.deriv_f1, 2), sz1);
    k.cderiv(ws.w1.ky.data(), dptr(ws.u_f1, 1), dptr(ws.deriv_f1, 3), sz1);
    for (int p = 0; p < 4; ++p)
        inverse_c(ws.fine1, ws.deriv_f1.component(p), ws.p1_plane(2 + p));
    inverse_c(ws.fine1, ws.u_f1.component(0), ws.p1_plane(0));
    inverse_c(ws.fine1, ws.u_f1.component(1), ws.p1_plane(1));
    k.advect_products(ws.p1_plane(0), ws.p1_plane(1), ws.p1_plane(2), ws.p1_plane(3),
                      ws.p1_plane(4), ws.p1_plane(5), ws.p1_plane(6), ws.p1_plane(7),
                      ws.p1_plane(8), ws.p1_plane(9), ws.p1_plane(10), n1);
    forward_c(ws.fine1, ws.p1_plane(6), ws.u_f1.component(0));     // w1
    forward_c(ws.fine1, ws.p1_plane(7), ws.u_f1.component(1));     // w2
    forward_c(ws.fine1, ws.p1_plane(8), ws.deriv_f1.component(0)); // q11
    forward_c(ws.fine1, ws.p1_plane(9), ws.deriv_f1.component(1)); // q12
    forward_c(ws.fine1, ws.p1_plane(10), ws.deriv_f1.component(2));// q22
    zero(ws.b_f1);
    k.caxpy(0.5, dptr(ws.u_f1, 0), dptr(ws.b_f1, 0), sz1);
    k.cderiv_acc(ws.kxh1.data(), dptr(ws.deriv_f1, 0), dptr(ws.b_f1, 0), sz1);
    k.cderiv_acc(ws.kyh1.data(), dptr(ws.deriv_f1, 1), dptr(ws.b_f1, 0), sz1);
    k.caxpy(0.5, dptr(ws.u_f1, 1), dptr(ws.b_f1, 1), sz1);
    k.cderiv_acc(ws.kxh1.data(), dptr(ws.deriv_f1, 1), dptr(ws.b_f1, 1), sz1);
    k.cderiv_acc(ws.kyh1.data(), dptr(ws.deriv_f1, 2), dptr(ws.b_f1, 1), sz1);
    transfer(ws.b_f1, ws.scratch2);
    zero(out);
    k.caxpy(-1.0, dptr(ws.scratch2), dptr(out), 2 * szb);

    // Cubic stress on the doubled grid: out += beta * div(|E|^2 E), the
    // (sign-resolved) projected contribution of the dissipative stress.
    strain_to_fine(ws, u);
    quartic = k.strain_quartic_sum(ws.p2_plane(0), ws.p2_plane(1), ws.p2_plane(2), n2) *
              ws.fine2.cell_area();
    k.strain_cubic(ws.p2_plane(0), ws.p2_plane(1), ws.p2_plane(2), ws.p2_plane(3),
                   ws.p2_plane(4), ws.p2_plane(5), n2);
    forward_c(ws.fine2, ws.p2_plane(3), ws.strain_f2.component(0));
    forward_c(ws.fine2, ws.p2_plane(4), ws.strain_f2.component(1));
    forward_c(ws.fine2, ws.p2_plane(5), ws.strain_f2.component(2));
    const std::size_t sz2 = spectral_size(ws.fine2.n);
    k.cderiv(ws.w2.kx.data(), dptr(ws.strain_f2, 0), dptr(ws.div_f2, 0), sz2);
    k.cderiv_acc(ws.w2.ky.data(), dptr(ws.strain_f2, 1), dptr(ws.div_f2, 0), sz2);
    k.cderiv(ws.w2.kx.data(), dptr(ws.strain_f2, 1), dptr(ws.div_f2, 1), sz2);
    k.cderiv_acc(ws.w2.ky.data(), dptr(ws.strain_f2, 2), dptr(ws.div_f2, 1), sz2);
    transfer(ws.div_f2, ws.scratch2);
    k.caxpy(ws.cfg.fluid.beta, dptr(ws.scratch2), dptr(out), 2 * szb);

    if (ws.has_forcing) k.caxpy(1.0, dptr(ws.forcing), dptr(out), 2 * szb);
}

void advance_truth(Workspace& ws, SpectralField& u, double& quartic) {
    const auto& k = kernels::active();
    const std::size_t szb = spectral_size(ws.base.n);
    eval_drift(ws, u, ws.drift, quartic);
    apply_coefficient_spectral(ws.coeff, ws.model, u, ws.dW, ws.noise_inc);
    k.caxpy(ws.dt, dptr(ws.drift), dptr(u), 2 * szb);
    k.caxpy(1.0, dptr(ws.noise_inc), dptr(u), 2 * szb);
    k.cscale(ws.inv_plain.data(), dptr(u, 0), szb);
    k.cscale(ws.inv_plain.data(), dptr(u, 1), szb);
    project_spectral(u, ws.wb);
}

// One assimilation step. Spectral observations enter implicitly against the
// post-step truth (unconditionally stable); cell averages enter explicitly
// against the pre-step truth stored in ws.truth_old. With kappa = 0 the
// code path is identical to advance_truth, which keeps an unnudged twin
// bit-equal to the truth system.
void advance_assim(Workspace& ws, SpectralField& x, const SpectralField& truth_new) {
    const auto& k = kernels::active();
    const std::size_t szb = spectral_size(ws.base.n);
    double quartic = 0.0;
    eval_drift(ws, x, ws.drift, quartic);
    if (!ws.spectral_nudging && ws.kappa > 0.0) {
        copy_field(x, ws.scratch2);
        k.caxpy(-1.0, dptr(ws.truth_old), dptr(ws.scratch2), 2 * szb);
        VelocityField diff(ws.base);
        inverse_c(ws.base, ws.scratch2.component(0), diff.component(0));
        inverse_c(ws.base, ws.scratch2.component(1), diff.component(1));
        const VelocityField obs = volume_element(diff, ws.cfg.cda.interpolant);
        forward_c(ws.base, obs.component(0), ws.scratch2.component(0));
        forward_c(ws.base, obs.component(1), ws.scratch2.component(1));
        k.caxpy(-ws.kappa, dptr(ws.scratch2), dptr(ws.drift), 2 * szb);
    }
    apply_coefficient_spectral(ws.coeff, ws.model, x, ws.dW, ws.noise_inc);
    k.caxpy(ws.dt, dptr(ws.drift), dptr(x), 2 * szb);
    k.caxpy(1.0, dptr(ws.noise_inc), dptr(x), 2 * szb);
    if (ws.spectral_nudging && ws.kappa > 0.0) {
        copy_field(truth_new, ws.scratch2);
        k.cscale(ws.nudge_gain.data(), dptr(ws.scratch2, 0), szb);
        k.cscale(ws.nudge_gain.data(), dptr(ws.scratch2, 1), szb);
        k.caxpy(1.0, dptr(ws.scratch2), dptr(x), 2 * szb);
        k.cscale(ws.inv_nudged.data(), dptr(x, 0), szb);
        k.cscale(ws.inv_nudged.data(), dptr(x, 1), szb);
    } else {
        k.cscale(ws.inv_plain.data(), dptr(x, 0), szb);
        k.cscale(ws.inv_plain.data(), dptr(x, 1), szb);
    }
    project_spectral(x, ws.wb);
}

bool finite_state(const SpectralField& s) {
    const double ss = kernels::active().sumsq(dptr(s), 2 * s.data.size());
    return std::isfinite(ss);
}

double sup_speed(Workspace& ws, const SpectralField& u) {
    copy_field(u, ws.scratch2);
    inverse_c(ws.base, ws.scratch2.component(0), ws.pb_plane(0));
    inverse_c(ws.base, ws.scratch2.component(1), ws.pb_plane(1));
    const auto& k = kernels::active();
    const std::size_t nb = ws.base.samples_per_component();
    return std::max(k.max_abs(ws.pb_plane(0), nb), k.max_abs(ws.pb_plane(1), nb));
}

// Everything except the envelope column, which needs err_sq at t = 0 and
// is filled by the caller.
DiagnosticsRecord make_record(Workspace& ws, const SpectralField& u, const SpectralField& x,
                              double t, double accum, bool with_assim) {
    const auto& k = kernels::active();
    DiagnosticsRecord r;
    r.t = t;
    r.e_truth = ws.base.area * plancherel_sumsq(u);
    r.grad_sq = ws.base.area * plancherel_weighted_sumsq(u, ws.wb.k2.data());
    r.strain_l4_4 = quartic_of(ws, u);
    r.accum = accum;
    if (with_assim) {
        r.e_assim = ws.base.area * plancherel_sumsq(x);
        copy_field(u, ws.scratch2);
        k.caxpy(-1.0, dptr(x), dptr(ws.scratch2), 2 * spectral_size(ws.base.n));
        r.err_sq = ws.base.area * plancherel_sumsq(ws.scratch2);
    }
    return r;
}

double envelope_value(double err0_sq, double kappa, double c_env, double t, double accum) {
    const double expo = std::clamp(-kappa * t + c_env * accum, -700.0, 700.0);
    return err0_sq * std::exp(expo);
}

std::vector<DiagnosticsRecord> run_path(const RunConfig& cfg, double nd_hat,
                                        std::uint64_t stream, bool with_assim) {
    Workspace ws(cfg);
    SpectralField u = initial_spectral(ws, false);
    SpectralField x = with_assim ? initial_spectral(ws, true) : SpectralField(ws.base, 2);
    PathRng rng(cfg.seed, stream);

    const double eps0 = epsilon0(cfg.fluid);
    const double c_env =
        with_assim && nd_hat > 0.0
            ? 27.0 * std::pow(nd_hat, 4) /
                  (16.0 * ws.base.lambda1 * std::pow(cfg.fluid.nu, 3) * std::pow(eps0, 3))
            : 0.0;

    const long n_steps = std::llround(cfg.T / cfg.dt);
    const long every = std::max<long>(1, std::llround(cfg.cadence / cfg.dt));
    const double h = ws.base.L / ws.base.n;

    std::vector<DiagnosticsRecord> recs;
    recs.reserve(static_cast<std::size_t>(n_steps / every) + 2);
    double accum = 0.0;

    DiagnosticsRecord first = make_record(ws, u, x, 0.0, 0.0, with_assim);
    first.envelope = first.err_sq;
    recs.push_back(first);
    const double err0_sq = first.err_sq;

    const bool save_old_truth = with_assim && !ws.spectral_nudging && ws.kappa > 0.0;
    for (long s = 1; s <= n_steps; ++s) {
        sample_increment_spectral(ws.model, cfg.dt, rng, ws.dW);
        if (save_old_truth) copy_field(u, ws.truth_old);
        double quartic = 0.0;
        advance_truth(ws, u, quartic);
        accum += cfg.dt * quartic;  // left-endpoint rule for the strain integral
        if (with_assim) advance_assim(ws, x, u);
        if (!finite_state(u) || (with_assim && !finite_state(x)))
            throw BlowUpError("run aborted: nonfinite state at step " + std::to_string(s), s,
                              recs);
        if (s % every == 0 || s == n_steps) {
            const double t = cfg.dt * static_cast<double>(s);
            DiagnosticsRecord r = make_record(ws, u, x, t, accum, with_assim);
            if (with_assim)
                r.envelope = envelope_value(err0_sq, ws.kappa, c_env, t, accum);
            recs.push_back(r);
            const double speed = std::max(sup_speed(ws, u), with_assim ? sup_speed(ws, x) : 0.0);
            if (cfg.dt * speed / h > 0.5)
                throw BlowUpError("run aborted: advective stability guard tripped at step " +
                                      std::to_string(s),
                                  s, recs);
        }
    }
    return recs;
}

int thread_count() {
    if (const char* env = std::getenv("TGF_CDA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

void validate_config(const RunConfig& cfg) {
    const DomainSpec g = make_grid(cfg.grid.n, cfg.grid.L);
    validate_params(cfg.fluid);
    make_coefficient(cfg.noise.kind, cfg.noise.sigma0, cfg.noise.sigma1);
    build_noise(cfg.noise.k_max, cfg.noise.a, cfg.noise.s, g);
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
    if (!(cfg.T >= cfg.dt))
        throw std::invalid_argument("config: T must cover at least one step of size dt");
    if (!(cfg.cadence > 0.0)) throw std::invalid_argument("config: cadence must be positive");
    if (cfg.cda.kappa < 0.0)
        throw std::invalid_argument("config: kappa must be nonnegative");
    if (cfg.cda.kappa > 0.0) {
        if (cfg.cda.interpolant.kind == InterpolantKind::VolumeElement) {
            if (cfg.cda.kappa * cfg.dt > 0.5)
                throw std::invalid_argument(
                    "config: explicit cell-average nudging requires kappa*dt <= 0.5");
            volume_cells(cfg.cda.interpolant, g);
        } else if (!(cfg.cda.interpolant.varpi > 0.0 && cfg.cda.interpolant.varpi < g.L)) {
            throw std::invalid_argument("config: interpolant varpi must lie strictly in (0, L)");
        }
    }
    const int band_limit = g.n / 2 - 1;
    for (const InitialSettings* init : {&cfg.init_truth, &cfg.init_assim}) {
        if (init->preset == InitPreset::RandomBand) {
            if (init->band < 1 || init->band > band_limit)
                throw std::invalid_argument("config: init band outside the retained spectral band");
            if (init->amplitude < 0.0)
                throw std::invalid_argument("config: init amplitude must be nonnegative");
        }
    }
}

VelocityField initial_field(const RunConfig& cfg, bool assimilated) {
    Workspace ws(cfg);
    return inverse_velocity(initial_spectral(ws, assimilated));
}

VelocityField forcing_field(const RunConfig& cfg) {
    Workspace ws(cfg);
    SpectralField f = ws.forcing;
    project_spectral(f, ws.wb);
    return inverse_velocity(std::move(f));
}

VelocityField step_truth(const VelocityField& state, const RunConfig& cfg,
                         const VelocityField& dW) {
    Workspace ws(cfg);
    if (!state.domain.same_grid(ws.base) || !dW.domain.same_grid(ws.base))
        throw std::invalid_argument("step: field grid does not match the configuration");
    SpectralField u = forward(state);
    ws.dW = forward(dW);
    double quartic = 0.0;
    advance_truth(ws, u, quartic);
    return inverse_velocity(std::move(u));
}

VelocityField step_assimilated(const VelocityField& state, const VelocityField& obs_source,
                               const RunConfig& cfg, const VelocityField& dW) {
    Workspace ws(cfg);
    if (!state.domain.same_grid(ws.base) || !obs_source.domain.same_grid(ws.base) ||
        !dW.domain.same_grid(ws.base))
        throw std::invalid_argument("step: field grid does not match the configuration");
    SpectralField x = forward(state);
    SpectralField obs = forward(obs_source);
    ws.dW = forward(dW);
    if (!ws.spectral_nudging && ws.kappa > 0.0) copy_field(obs, ws.truth_old);
    advance_assim(ws, x, obs);
    return inverse_velocity(std::move(x));
}

std::vector<DiagnosticsRecord> run_truth(const RunConfig& cfg) {
    return run_path(cfg, 0.0, 0, false);
}

std::vector<DiagnosticsRecord> run_twin(const RunConfig& cfg) {
    return run_path(cfg, effective_nd_hat(cfg), 0, true);
}

double effective_nd_hat(const RunConfig& cfg, int iters) {
    if (cfg.constants.nd_hat) return *cfg.constants.nd_hat;
    const DomainSpec g = make_grid(cfg.grid.n, cfg.grid.L);
    PathRng rng(cfg.seed, kStreamEmbedding);
    return 1.25 * estimate_Nd(g, iters, rng);
}

McResult run_monte_carlo(const RunConfig& cfg, int n_paths) {
    if (n_paths < 1)
        throw std::invalid_argument("monte-carlo: need at least one path");
    validate_config(cfg);
    const double nd_hat = effective_nd_hat(cfg);

    std::vector<std::vector<DiagnosticsRecord>> series(n_paths);
    std::vector<char> ok(n_paths, 0);
    std::atomic<long> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        while (true) {
            const long i = next.fetch_add(1);
            if (i >= n_paths) break;
            try {
                series[i] = run_path(cfg, nd_hat, static_cast<std::uint64_t>(i), true);
                ok[i] = 1;
            } catch (const BlowUpError&) {
                ok[i] = 0;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const int workers = std::min(thread_count(), n_paths);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    McResult mc;
    mc.paths_requested = n_paths;
    for (int i = 0; i < n_paths; ++i) {
        if (ok[i]) ++mc.paths_used;
        else mc.excluded_paths.push_back(i);
    }
    mc.paths_excluded = n_paths - mc.paths_used;
    if (10 * mc.paths_excluded > n_paths)
        throw std::runtime_error(
            "monte-carlo: more than 10% of paths aborted; the configuration is not stable "
            "at this resolution");
    mc.degenerate_bands = mc.paths_used < 2;

    std::size_t n_rec = 0;
    for (int i = 0; i < n_paths; ++i)
        if (ok[i]) { n_rec = series[i].size(); break; }
    mc.t.resize(n_rec);
    mc.mean_err_sq.assign(n_rec, 0.0);
    mc.stderr_err_sq.assign(n_rec, 0.0);
    mc.mean_truth_e4.assign(n_rec, 0.0);
    mc.path_err_sq.reserve(mc.paths_used);

    for (int i = 0; i < n_paths; ++i) {
        if (!ok[i]) continue;
        std::vector<double> errs(n_rec);
        for (std::size_t r = 0; r < n_rec; ++r) errs[r] = series[i][r].err_sq;
        mc.path_err_sq.push_back(std::move(errs));
    }
    for (std::size_t r = 0; r < n_rec; ++r) {
        for (int i = 0; i < n_paths; ++i)
            if (ok[i]) { mc.t[r] = series[i][r].t; break; }
        double sum = 0.0, sum_e4 = 0.0;
        for (const auto& path : mc.path_err_sq) sum += path[r];
        for (int i = 0; i < n_paths; ++i)
            if (ok[i]) sum_e4 += series[i][r].e_truth * series[i][r].e_truth;
        const double m = static_cast<double>(mc.paths_used);
        mc.mean_err_sq[r] = sum / m;
        mc.mean_truth_e4[r] = sum_e4 / m;
        if (mc.paths_used >= 2) {
            double ss = 0.0;
            for (const auto& path : mc.path_err_sq) {
                const double d = path[r] - mc.mean_err_sq[r];
                ss += d * d;
            }
            mc.stderr_err_sq[r] = std::sqrt(ss / (m - 1.0) / m);
        }
    }
    return mc;
}

}  // namespace tgf
