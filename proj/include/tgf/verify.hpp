#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgf/grid.hpp"

// Self-check suite for the discrete operators: duality pairings, the
// skew-symmetric advection pairing, the cubic-stress difference identity,
// and the quadratic-stress difference bound, all evaluated on ensembles of
// random band-limited divergence-free fields. The CLI exposes this as
// `verify-ops`; the acceptance suite reuses it verbatim.

namespace tgf {

struct IdentityCheck {
    std::string name;
    double residual = 0.0;   ///< worst normalized residual over the ensemble
    double tolerance = 0.0;
    int samples = 0;
    bool pass = false;
};

/// Runs every identity check over `fields` random fields (pairs where the
/// check needs two) on the given grid. Deterministic for a fixed seed.
/// Throws std::invalid_argument for fields < 1 or an unvalidated grid.
std::vector<IdentityCheck> operator_identity_suite(const DomainSpec& grid, int fields,
                                                   std::uint64_t seed);

/// True when every check in the report passed.
bool all_pass(const std::vector<IdentityCheck>& report);

}  // namespace tgf
