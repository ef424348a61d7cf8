#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlpf/config.hpp"
#include "nlpf/diagnostics.hpp"
#include "nlpf/state.hpp"

namespace nlpf {

struct StepStats {
    int newton_iters_max = 0;
    double newton_residual_max = 0.0;  // max |g(χ_{n+1})| over nodes
    int cg_iters = 0;
    double cg_residual = 0.0;
};

/// One IMEX step of the coupled system.
///
/// Stage 1 (χ, implicit in the stiff local terms, explicit in the bounded
/// nonlocal/coupling terms): at every node solve
///   c + Δt(κ(x)c + W′(c)) = χ_n(x) + Δt(J[χ_n](x) + α θ_n(x))
/// by safeguarded Newton bracketed in (−1+ε_g, 1−ε_g) with bisection
/// fallback; the map is strictly increasing under the stability gate
/// 1 + Δt(κ_min + inf W″) > 0, which is checked, and g′ > 0 is asserted at
/// the accepted root. Stage 2 (θ, implicit): (I + ΔtA)θ_{n+1} =
/// θ_n − α(χ_{n+1} − χ_n) + Δt f by Jacobi-preconditioned CG.
///
/// The per-node scalar solves are independent and run in parallel; all
/// reductions use the fixed-order blocked scheme, so results are
/// bit-identical for any thread count.
StepStats step(SystemState& state, const SimConfig& cfg, const NonlocalOperator& op,
               const PotentialSpec& potential, const ScalarField& source);

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    SystemState final_state;
    bool completed = false;
    std::string failure;  // structured message when completed == false
    double failure_time = 0.0;
    double min_delta = 1.0;            // min over the run of 1 − max|χ|
    double newton_residual_max = 0.0;  // max over the run
    int steps_taken = 0;
};

using RecordObserver = std::function<void(const DiagnosticsRecord&, const SystemState&)>;

/// Integrates to t_final (which must be an integer multiple of dt), emitting
/// a record at step 0, every cadence-th step and the final step. Guard-band
/// violations and solver failures terminate the run early with a structured
/// failure report instead of throwing.
RunResult run(const SimConfig& cfg, const NonlocalOperator& op, const PotentialSpec& potential,
              const RecordObserver& observer = {});
RunResult run(const SimConfig& cfg, const RecordObserver& observer = {});

/// Initial state from the config's profiles (or snapshot files), validated
/// against the required margin δ₀.
SystemState make_initial_state(const SimConfig& cfg, const DomainGrid& grid);
ScalarField make_source_field(const SimConfig& cfg, const DomainGrid& grid);

/// Continuous-dependence experiment: runs both initial states with identical
/// numerics and reports the difference-norm table plus sup-ratio fits.
struct DependenceRow {
    double t = 0.0;
    double l2_dtheta = 0.0;
    double v_dtheta = 0.0;
    double l2_dchi = 0.0;
    double lhs_l2 = 0.0;  // ‖θd(t)‖ + ‖∇θd‖_{L²(0,t;H)} + ‖χd(t)‖
    double lhs_v = 0.0;   // ‖∇θd(t)‖ + ‖Aθd‖_{L²(0,t;H)}
};

struct DependenceResult {
    std::vector<DependenceRow> rows;
    double ic_distance_l2 = 0.0;  // ‖θd(0)‖ + ‖χd(0)‖
    double ic_distance_v = 0.0;   // ‖θd(0)‖_V + ‖χd(0)‖
    double lambda_l2 = 0.0;       // sup_t lhs_l2 / ic_distance_l2
    double lambda_v = 0.0;        // sup_t lhs_v / ic_distance_v
    /// sup ratio restricted to t ≤ horizon (for growth-in-T fits).
    double lambda_l2_at(double horizon) const;
};

DependenceResult continuous_dependence_experiment(const SimConfig& cfg, const SystemState& ic1,
                                                  const SystemState& ic2);

}  // namespace nlpf
