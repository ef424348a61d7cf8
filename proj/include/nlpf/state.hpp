#pragma once

#include "nlpf/grid.hpp"

namespace nlpf {

/// Discrete solution pair (θ, χ) at time t, plus the last step's difference
/// quotient χ_t for diagnostics.
struct SystemState {
    ScalarField theta;
    ScalarField chi;
    ScalarField chi_t;
    double time = 0.0;
};

SystemState make_state(const DomainGrid& grid);

/// Finiteness of all fields plus the chi invariant |χ| < 1 (throws, never clamps).
void validate_state(const SystemState& state);

}  // namespace nlpf
