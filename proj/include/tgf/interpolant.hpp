#pragma once

#include <cstddef>
#include <string>

#include "tgf/grid.hpp"
#include "tgf/noise.hpp"

// Observation operators at length scale varpi: piecewise-constant cell
// averaging and low-mode spectral truncation, plus an empirical certificate
// for the approximation constant that relates the observation residual to
// the observed field's H1 size.

namespace tgf {

enum class InterpolantKind { VolumeElement, FourierModes };

struct InterpolantSpec {
    InterpolantKind kind = InterpolantKind::FourierModes;
    double varpi = 0.0;  ///< observation length scale, 0 < varpi < L
};

/// Cell count per axis for a VolumeElement spec on this grid: L/varpi
/// snapped to the nearest divisor of n (ties resolved toward more cells).
/// Throws when varpi is out of range or finer than the grid spacing.
int volume_cells(const InterpolantSpec& spec, const DomainSpec& grid);

/// Piecewise-constant field of cell means. Block sums use pairwise
/// reduction, so for power-of-two block sizes repeated application is
/// bit-stable.
VelocityField volume_element(const VelocityField& f, const InterpolantSpec& spec);

/// Spectral truncation: coefficients with |k_phys| > 1/varpi are zeroed;
/// the mean mode is always retained.
VelocityField fourier_modes(const VelocityField& f, const InterpolantSpec& spec);

/// Either operator, dispatched on spec.kind.
VelocityField observe(const VelocityField& f, const InterpolantSpec& spec);

/// Empirical certificate for the observation-residual constant:
/// c0_hat = max over the ensemble of
///   ||f - R f||^2 / (varpi^2 (||f||^2 + |f|_H1^2)).
struct C0Certificate {
    InterpolantSpec interpolant;
    double c0_hat = 0.0;
    int ensemble_size = 0;
    double max_ratio = 0.0;       ///< equals c0_hat; kept for serialization
    std::string smoothness;       ///< description of the random ensemble
};

/// Maximizes the residual ratio over random smooth divergence-free fields
/// plus single-mode probes near the cutoff scale. Requires samples >= 50;
/// throws on a degenerate (all-zero-ratio) ensemble.
C0Certificate estimate_c0(const InterpolantSpec& spec, const DomainSpec& grid, int samples,
                          PathRng& rng);

/// JSON form of the certificate (consumed by the parameter checker).
std::string to_json(const C0Certificate& cert);

}  // namespace tgf
