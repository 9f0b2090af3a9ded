#pragma once

#include "tgf/grid.hpp"

// Spatial operators of the incompressible third-grade model, realized
// pseudo-spectrally on the torus: the solenoidal projection, the dissipative
// (Stokes) operator, advection, and the two non-Newtonian stress operators
// driven by the strain tensor. Quadratic products are formed on a 3/2
// padded grid and cubic products on a doubled grid, so the algebraic
// identities these operators satisfy (energy pairing, advection
// antisymmetry, strain duality) hold to roundoff rather than to a
// discretization tolerance.

namespace tgf {

/// Material parameters. nu is the viscosity, alpha the quadratic-stress
/// modulus, beta the cubic-stress modulus. The thermodynamic restriction
/// |alpha| < sqrt(2 nu beta) is required strictly, which makes epsilon0
/// positive.
struct FluidParams {
    double nu = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
};

/// Throws std::invalid_argument unless nu > 0, beta > 0 and
/// |alpha| < sqrt(2 nu beta) strictly.
void validate_params(const FluidParams& p);

/// The damping margin 1 - sqrt(alpha^2 / (2 beta nu)) in (0, 1].
double epsilon0(const FluidParams& p);

/// Orthogonal projection onto mean-zero divergence-free fields.
VelocityField leray_project(const VelocityField& u);

/// Symmetrized gradient E(xi) = grad xi + (grad xi)^T.
TensorField strain(const VelocityField& xi);

/// Dissipative operator: -Laplacian followed by projection.
VelocityField stokes(const VelocityField& xi);

/// Projected advection P[(xi . grad) zeta] in the skew-symmetric average
/// form 1/2 [(xi . grad) zeta + div(xi x zeta)], which vanishes exactly in
/// the pairing against zeta for divergence-free xi. Throws when xi is not
/// divergence-free.
VelocityField advect(const VelocityField& xi, const VelocityField& zeta);

/// The advection form b(xi, zeta, upsilon) = integral of (xi . grad) zeta
/// . upsilon, by exact quadrature on the padded grid. Throws when xi is not
/// divergence-free.
double trilinear(const VelocityField& xi, const VelocityField& zeta, const VelocityField& upsilon);

/// Quadratic stress J(xi) = -P div(E(xi)^2), with the true matrix square.
VelocityField grade2_stress(const VelocityField& xi);

/// Cubic stress K(xi) = -P div(|E(xi)|^2 E(xi)).
VelocityField grade3_stress(const VelocityField& xi);

}  // namespace tgf
