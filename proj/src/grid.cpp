#include "tgf/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tgf/kernels.hpp"

namespace tgf {

DomainSpec make_grid(int n, double L) {
    if (n < 8) throw std::invalid_argument("resolution too small: n = " + std::to_string(n) + " (need n >= 8)");
    if (n % 2 != 0) throw std::invalid_argument("resolution must be even: n = " + std::to_string(n));
    if (!(L > 0.0)) throw std::invalid_argument("side length must be positive: L = " + std::to_string(L));
    DomainSpec g;
    g.d = 2;
    g.n = n;
    g.L = L;
    g.area = L * L;
    double k1 = 2.0 * std::numbers::pi / L;
    g.lambda1 = k1 * k1;
    return g;
}

bool all_finite(const VelocityField& f) {
    // A single NaN or infinity poisons the sum of squares.
    return std::isfinite(kernels::active().sumsq(f.data.data(), f.data.size()));
}

VelocityField add(const VelocityField& a, const VelocityField& b) {
    if (!a.domain.same_grid(b.domain)) throw std::invalid_argument("grid mismatch in field addition");
    VelocityField out = a;
    kernels::active().axpy(1.0, b.data.data(), out.data.data(), out.data.size());
    return out;
}

VelocityField subtract(const VelocityField& a, const VelocityField& b) {
    if (!a.domain.same_grid(b.domain)) throw std::invalid_argument("grid mismatch in field subtraction");
    VelocityField out = a;
    kernels::active().axpy(-1.0, b.data.data(), out.data.data(), out.data.size());
    return out;
}

VelocityField scaled(const VelocityField& f, double factor) {
    VelocityField out = f;
    kernels::active().scale(factor, out.data.data(), out.data.size());
    return out;
}

}  // namespace tgf
