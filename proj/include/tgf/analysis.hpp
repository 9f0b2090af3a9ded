#pragma once

#include <map>
#include <string>
#include <vector>

#include "tgf/engine.hpp"
#include "tgf/grid.hpp"
#include "tgf/noise.hpp"

// The constants layer: closed-form drift and gain-window arithmetic from
// the synchronization analysis, empirical estimators for the two constants
// that have no usable closed form (the sup-norm embedding constant and the
// observation-residual constant), decay-rate fits, and the pathwise
// envelope audit.

namespace tgf {

/// Assembled constants for one configuration. Every entry carries a
/// provenance note: "analytic" (closed form of config data), "estimated"
/// (empirical maximization), or "supplied" (config override).
struct ConstantsLedger {
    double nu = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double lambda1 = 0.0;   ///< first eigenvalue of the dissipative operator
    double epsilon0 = 0.0;  ///< damping margin of the material parameters
    double nd_hat = 0.0;    ///< sup-norm embedding constant (margin included)
    double c0_hat = 0.0;    ///< observation-residual constant
    double M = 0.0;         ///< mean-square drift bound
    double L_lip = 0.0;     ///< state-Lipschitz constant of the noise coefficient
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    bool window_nonempty = false;
    std::map<std::string, std::string> provenance;

    /// True when any entry is only empirically estimated, in which case
    /// window verdicts are advisory rather than certified.
    bool advisory() const {
        for (const auto& [key, tag] : provenance)
            if (tag.rfind("estimated", 0) == 0) return true;
        return false;
    }
};

/// Drift bound of the mean-square analysis:
///   M = K + (1/(4 beta)) ((K_tilde / lambda1) + 1)^2 area
///       + (27 alpha^4 / (4 beta^3)) area + h_dual_norm^2.
/// With K_tilde = 0 this is also the additive-noise bracket, so selecting
/// by noise kind happens through the coefficient constants alone.
/// Throws for nonpositive beta or lambda1.
double drift_bound_M(double K, double K_tilde, double lambda1, double area, double alpha,
                     double beta, double h_dual_norm);

struct KappaWindow {
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    bool nonempty = false;
};

/// Admissible gain window
///   kappa_min = 27 Nd_hat^4 M / (4 beta lambda1 nu^3 eps0^3) + L_lip,
///   kappa_max = nu eps0 / (c0_hat varpi^2).
/// An empty window (kappa_min >= kappa_max) is flagged, not an error.
/// Throws for eps0 outside (0, 1] or nonpositive c0_hat / varpi.
KappaWindow kappa_window(double nd_hat, double M, double beta, double lambda1, double nu,
                         double eps0, double L_lip, double c0_hat, double varpi);

/// Empirical lower bound for the constant in ||u||_inf <= N ||E(u)||_4:
/// running maximum of the ratio over canonical shear modes, random smooth
/// solenoidal fields, and coordinate-ascent perturbations of the incumbent.
/// The sup norm is read off a doubled grid. Returns the raw maximum
/// (callers apply their own safety margin). Monotone in iters; iters >= 100.
double estimate_Nd(const DomainSpec& grid, int iters, PathRng& rng);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_a = 0.0;  ///< first fitted time
    double t_b = 0.0;  ///< last fitted time
    double r2 = 0.0;
    bool clamped = false;  ///< some values hit the positivity floor
    int points = 0;
};

/// Least-squares line through (t, log value) for samples with t >= burn_in.
/// Nonpositive values are clamped to 1e-300 and flagged. A constant series
/// fits exactly (slope 0, R^2 = 1 by convention). Throws with fewer than
/// 10 usable points.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                        double burn_in);

struct EnvelopeAudit {
    long total = 0;
    long violations = 0;
    double compliance = 0.0;           ///< fraction of records within the envelope
    double max_violation_ratio = 0.0;  ///< worst err_sq / envelope among violations
    bool pass = false;                 ///< compliance >= 0.99
};

/// Recomputes the pathwise envelope of each record from the strain
/// accumulator and the ledger constants,
///   err_sq(0) * exp(-kappa t + 27 nd^4 / (16 lambda1 nu^3 eps0^3) accum),
/// and reports the violation fraction. A zero envelope tolerates only
/// roundoff-scale errors. Throws when the accumulator column is missing
/// (non-finite) or the record list is empty.
EnvelopeAudit envelope_audit(const std::vector<DiagnosticsRecord>& records, double kappa,
                             const ConstantsLedger& constants);

/// Assembles the full ledger for a configuration: analytic constants in
/// closed form, empirical ones from the estimators unless overridden.
/// Estimator randomness is seeded from cfg.seed on fixed streams, so the
/// ledger is deterministic per configuration.
ConstantsLedger build_ledger(const RunConfig& cfg, int nd_iters = 200, int c0_samples = 100);

}  // namespace tgf
