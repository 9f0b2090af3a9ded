#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tgf/aligned.hpp"
#include "tgf/grid.hpp"

// Thin deterministic wrapper around the FFT backend plus the spectral
// bookkeeping shared by every operator: half-spectrum layout, mathematical
// Fourier coefficients, band limiting, transfer between grid sizes, and
// Plancherel sums.
//
// Conventions. For an n x n real field the half spectrum holds n rows
// (index iy, signed wavenumber ky = iy for iy < n/2, iy - n otherwise) by
// n/2 + 1 columns (ikx = 0 .. n/2); entry (ikx, iy) lives at
// iy*(n/2 + 1) + ikx. forward() divides the raw transform by n^2, so the
// stored values are the coefficients c_k of f(x) = sum c_k exp(i k.x) and
// can be moved between grid sizes without rescaling. inverse() is the plain
// unnormalized synthesis. Both directions zero nothing except forward()'s
// band limit: the Nyquist column ikx = n/2 and row iy = n/2 are cleared so
// that retained content always has |kx|, |ky| <= n/2 - 1 and a real inverse.

namespace tgf {

using cplx = std::complex<double>;
using CVec = std::vector<cplx, AlignedAllocator<cplx>>;

/// Number of retained complex entries of one component's half spectrum.
inline std::size_t spectral_size(int n) {
    return static_cast<std::size_t>(n) * (n / 2 + 1);
}

/// Row stride of the half spectrum.
inline int spectral_cols(int n) { return n / 2 + 1; }

/// Signed integer wavenumber of row iy.
inline int signed_ky(int n, int iy) { return iy < n / 2 ? iy : iy - n; }

/// Multi-component half spectrum with the grid it refers to.
struct SpectralField {
    DomainSpec domain;
    int comps = 0;
    CVec data;

    SpectralField() = default;
    SpectralField(const DomainSpec& g, int ncomp)
        : domain(g), comps(ncomp),
          data(static_cast<std::size_t>(ncomp) * spectral_size(g.n), cplx{0.0, 0.0}) {}

    cplx* component(int c) { return data.data() + static_cast<std::size_t>(c) * spectral_size(domain.n); }
    const cplx* component(int c) const {
        return data.data() + static_cast<std::size_t>(c) * spectral_size(domain.n);
    }
};

/// Physical wavenumbers and unit-wavevector components per spectral entry.
/// px, py are zero at the mean mode so projector formulas need no branch.
struct WaveTable {
    int n = 0;
    double L = 0.0;
    AVec kx, ky, k2, px, py;
    /// Plancherel weight per entry: 1 in the ikx = 0 column, 2 otherwise.
    AVec w;
};

WaveTable make_wave_table(const DomainSpec& g);

/// Forward transform of one component: spec = FFT(phys) / n^2 with the
/// Nyquist column and row cleared. phys is left untouched.
void forward_c(const DomainSpec& g, const double* phys, cplx* spec);

/// Inverse transform of one component. Destroys the spec buffer (backend
/// scratch), writes the synthesized samples into phys.
void inverse_c(const DomainSpec& g, cplx* spec, double* phys);

SpectralField forward(const VelocityField& f);
SpectralField forward(const TensorField& f);

/// Synthesis onto the spectrum's own grid. The spectral argument is taken
/// by value because the backend consumes it.
VelocityField inverse_velocity(SpectralField s);

/// Copies the retained band of src into a (zeroed) spectrum on dst_n. Works
/// both ways: upsampling pads with zeros, downsampling truncates to the
/// destination band. Component counts must match.
void transfer(const SpectralField& src, SpectralField& dst);

/// Plancherel sum per component c: sum_k w_k |c_k|^2, so that
/// ||f||_2^2 = area * plancherel_sumsq(...). Covers all comps.
double plancherel_sumsq(const SpectralField& s);

/// Same with an extra per-entry factor (e.g. |k|^2 for the H^1 seminorm).
double plancherel_weighted_sumsq(const SpectralField& s, const double* factor);

/// L^2 norm of the divergence, computed spectrally.
double divergence_norm(const SpectralField& s, const WaveTable& t);

/// Removes the non-solenoidal part and the mean in place.
void project_spectral(SpectralField& s, const WaveTable& t);

}  // namespace tgf
