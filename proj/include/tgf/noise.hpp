#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tgf/grid.hpp"
#include "tgf/spectral.hpp"

// Truncated trace-class Wiener forcing in the divergence-free subspace.
// Each integer wavenumber pair k in the half-space (kx > 0, or kx = 0 with
// ky > 0) carries a unit-norm cosine and sine basis field directed along
// the unit vector perpendicular to k, both weighted by the eigenvalue
// mu_k = a |k_phys|^(-2s). The operator trace counts both phases. Noise is
// synthesized directly in spectral space, so increments are mean-zero and
// divergence-free by construction.

namespace tgf {

/// Deterministic per-path random stream. Identical (seed, stream) pairs
/// reproduce identical sequences bit-exactly; distinct streams of one seed
/// are decorrelated by construction of the seeding hash.
class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t stream);

    /// Standard normal deviate (Box-Muller with a cached spare).
    double normal();
    /// Uniform deviate in [0, 1).
    double uniform();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct NoiseMode {
    int kx = 0;              ///< integer wavenumber, half-space convention
    int ky = 0;
    double mu = 0.0;         ///< covariance eigenvalue shared by both phases
    double dir_x = 0.0;      ///< unit vector perpendicular to k
    double dir_y = 0.0;
};

struct NoiseModel {
    DomainSpec domain;
    int k_max = 0;
    double a = 0.0;
    double s = 0.0;
    std::vector<NoiseMode> modes;  ///< fixed enumeration order (kx, then ky)
    double trace = 0.0;            ///< sum of mu over both phases of all modes
    double mu_max = 0.0;
};

enum class NoiseKind { Additive, DiagonalMultiplicative };

/// Noise coefficient acting on increments: Additive applies sigma0 only;
/// DiagonalMultiplicative additionally rescales each noise mode by sigma1
/// times the state's coefficient in that mode.
struct NoiseCoefficient {
    NoiseKind kind = NoiseKind::Additive;
    double sigma0 = 0.0;
    double sigma1 = 0.0;  ///< forced to 0 for Additive

    /// Growth constant: hs_norm(xi)^2 <= K + K_tilde ||xi||^2.
    double constant_K(const NoiseModel& m) const { return 2.0 * sigma0 * sigma0 * m.trace; }
    double constant_K_tilde(const NoiseModel& m) const {
        return 2.0 * sigma1 * sigma1 * m.mu_max;
    }
    /// Lipschitz constant of the coefficient in the state argument.
    double constant_L(const NoiseModel& m) const { return constant_K_tilde(m); }
};

/// Validated constructor helper; throws on negative amplitudes or a
/// multiplicative amplitude on an additive kind.
NoiseCoefficient make_coefficient(NoiseKind kind, double sigma0, double sigma1);

/// Enumerates modes with 0 < |k| <= k_max. Throws when k_max < 1, a <= 0,
/// s <= 1, or k_max exceeds the grid's retained band.
NoiseModel build_noise(int k_max, double a, double s, const DomainSpec& grid);

/// One Wiener increment over dt: sum over modes and phases of
/// sqrt(mu dt) g q with independent standard normals g drawn from rng in
/// the model's fixed mode order (cosine phase first).
VelocityField sample_increment(const NoiseModel& model, double dt, PathRng& rng);

/// The coefficient applied to an increment at state xi.
VelocityField apply_coefficient(const NoiseCoefficient& coeff, const NoiseModel& model,
                                const VelocityField& xi, const VelocityField& dW);

/// Squared covariance-weighted Hilbert-Schmidt norm of the coefficient at
/// state xi: sum over modes/phases of mu ||Phi q||^2.
double hs_norm(const NoiseCoefficient& coeff, const NoiseModel& model, const VelocityField& xi);

/// One basis field (for tests): mode index into model.modes, phase
/// selectable. Unit L2 norm.
VelocityField noise_basis_field(const NoiseModel& model, std::size_t mode_index, bool sine_phase);

// Spectral-space variants used by the time stepper (identical math, no
// physical-space round trips).
void sample_increment_spectral(const NoiseModel& model, double dt, PathRng& rng,
                               SpectralField& out);
void apply_coefficient_spectral(const NoiseCoefficient& coeff, const NoiseModel& model,
                                const SpectralField& xi, const SpectralField& dW,
                                SpectralField& out);
double hs_norm_spectral(const NoiseCoefficient& coeff, const NoiseModel& model,
                        const SpectralField& xi);

}  // namespace tgf
