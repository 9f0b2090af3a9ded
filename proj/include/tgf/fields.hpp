#pragma once

#include "tgf/grid.hpp"
#include "tgf/noise.hpp"
#include "tgf/spectral.hpp"

// Analytic and random field constructors shared by the run presets, the
// constant estimators, and the test suites. Everything here produces
// mean-zero divergence-free fields on the grid's retained band.

namespace tgf {

/// Single divergence-free Fourier mode: amplitude * dir * cos(k . x) (or
/// sine phase), with dir the unit vector perpendicular to the integer
/// wavenumber (kx, ky). Throws for the zero mode or one outside the band.
VelocityField mode_field(const DomainSpec& grid, int kx, int ky, double amplitude,
                         bool sine_phase);

/// Spectral version of mode_field, deposited into an existing spectrum.
void add_mode_spectral(SpectralField& s, int kx, int ky, double amplitude, bool sine_phase);

/// Random smooth divergence-free field: independent complex Gaussian
/// coefficients on 0 < |k| <= band shaped by |k|^(-decay), projected.
/// Not normalized; compose with rescale_l2 when a norm is prescribed.
VelocityField random_solenoidal(const DomainSpec& grid, int band, double decay, PathRng& rng);

/// Same, left in spectral space.
void random_solenoidal_spectral(SpectralField& s, int band, double decay, PathRng& rng);

/// Returns a copy scaled so norm_l2 equals target (zero fields throw).
VelocityField rescale_l2(const VelocityField& f, double target);

}  // namespace tgf
