#pragma once

#include "tgf/grid.hpp"

// Quadrature-based norms and pairings on grid fields. The rectangle rule on
// a uniform periodic grid integrates trigonometric polynomials below the
// Nyquist limit exactly, so these agree with the continuum values to
// roundoff for band-limited fields. The quartic norm upsamples to a doubled
// grid first, which keeps |f|^4 alias-free for content up to the working
// band limit.

namespace tgf {

/// L2 norm: (sum |f|^2 * cell-area)^(1/2).
double norm_l2(const VelocityField& f);

/// Lp norm for p in {2, 4}; pointwise magnitude is Euclidean.
double norm_lp(const VelocityField& f, int p);

/// Lp norm for p in {2, 4}; pointwise magnitude is the Frobenius norm.
double norm_lp(const TensorField& f, int p);

/// L2 pairing of two fields on the same grid.
double inner(const VelocityField& f, const VelocityField& g);

/// L2 norm of the full gradient, evaluated spectrally.
double h1_seminorm(const VelocityField& f);

/// Norm of the dual pairing against gradient-normed test fields, realized
/// spectrally as (sum |c_k|^2 / |k|^2)^(1/2) over nonzero wavenumbers.
/// Requires a mean-zero field (project first); throws otherwise.
double dual_norm(const VelocityField& f);

}  // namespace tgf
