#pragma once

#include <cstddef>

#include "tgf/aligned.hpp"

// Discrete representation of the periodic computational domain and the
// vector/tensor fields living on it. All fields are stored in physical
// space, component-major, row-major within a component with x contiguous:
// sample (ix, iy) of component c sits at c*n*n + iy*n + ix.

namespace tgf {

/// Uniform periodic grid on [0, L)^d with n samples per axis.
struct DomainSpec {
    int d = 2;         ///< spatial dimension (2 in supported scope)
    int n = 0;         ///< grid points per axis (even, >= 8)
    double L = 0.0;    ///< side length
    double area = 0.0; ///< L^d
    /// First eigenvalue of the dissipative operator on mean-zero
    /// divergence-free fields: (2*pi/L)^2 on the torus.
    double lambda1 = 0.0;

    std::size_t samples_per_component() const {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    double cell_area() const { return (L / n) * (L / n); }
    bool same_grid(const DomainSpec& o) const {
        return d == o.d && n == o.n && L == o.L;
    }
};

/// Validates (n, L) and fills in the derived quantities.
/// Throws std::invalid_argument for odd or too-small n, or non-positive L.
DomainSpec make_grid(int n, double L);

/// d-component real vector field sampled on the grid.
struct VelocityField {
    DomainSpec domain;
    AVec data; ///< d blocks of n*n samples

    VelocityField() = default;
    explicit VelocityField(const DomainSpec& g)
        : domain(g), data(static_cast<std::size_t>(g.d) * g.samples_per_component(), 0.0) {}

    double* component(int c) { return data.data() + static_cast<std::size_t>(c) * domain.samples_per_component(); }
    const double* component(int c) const { return data.data() + static_cast<std::size_t>(c) * domain.samples_per_component(); }

    double& at(int c, int ix, int iy) {
        return data[static_cast<std::size_t>(c) * domain.samples_per_component() +
                    static_cast<std::size_t>(iy) * domain.n + ix];
    }
    double at(int c, int ix, int iy) const {
        return data[static_cast<std::size_t>(c) * domain.samples_per_component() +
                    static_cast<std::size_t>(iy) * domain.n + ix];
    }
};

/// d x d real tensor field; entry (i, j) is stored as component i*d + j.
struct TensorField {
    DomainSpec domain;
    bool symmetric = false;
    AVec data; ///< d*d blocks of n*n samples

    TensorField() = default;
    explicit TensorField(const DomainSpec& g, bool sym = false)
        : domain(g), symmetric(sym),
          data(static_cast<std::size_t>(g.d) * g.d * g.samples_per_component(), 0.0) {}

    double* entry(int i, int j) {
        return data.data() +
               static_cast<std::size_t>(i * domain.d + j) * domain.samples_per_component();
    }
    const double* entry(int i, int j) const {
        return data.data() +
               static_cast<std::size_t>(i * domain.d + j) * domain.samples_per_component();
    }
};

/// True when every sample is finite.
bool all_finite(const VelocityField& f);

/// Elementwise helpers (allocating variants of the kernel primitives).
VelocityField add(const VelocityField& a, const VelocityField& b);
VelocityField subtract(const VelocityField& a, const VelocityField& b);
VelocityField scaled(const VelocityField& f, double factor);

inline VelocityField operator+(const VelocityField& a, const VelocityField& b) {
    return add(a, b);
}
inline VelocityField operator-(const VelocityField& a, const VelocityField& b) {
    return subtract(a, b);
}

/// Physical coordinate of sample index i along one axis.
inline double grid_coord(const DomainSpec& g, int i) { return g.L * i / g.n; }

}  // namespace tgf
