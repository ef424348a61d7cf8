#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlpf/kernel.hpp"
#include "nlpf/potential.hpp"
#include "nlpf/state.hpp"

namespace nlpf {

/// Per-sample scalar diagnostics. The CSV exposes the first ten columns in
/// this order; the remaining entries are in-memory extras used by the fits
/// and the acceptance experiments.
struct DiagnosticsRecord {
    double t = 0.0;
    double l2_theta = 0.0;
    double v_theta = 0.0;
    double l2_chi = 0.0;
    double max_abs_chi = 0.0;
    double delta_margin = 0.0;  // 1 − max|χ|
    double lyapunov = 0.0;
    double script_e = 0.0;
    double l2_chit = 0.0;
    int newton_iters_max = 0;

    double min_chi = 0.0;
    double max_chi = 0.0;
    double max_w = 0.0;  // max_x W(χ(x))
    double max_g = 0.0;  // max_x 𝓖(x)
};

inline constexpr const char* kDiagnosticsCsvHeader =
    "t,l2_theta,v_theta,l2_chi,max_abs_chi,delta_margin,lyapunov,scriptE,l2_chit,"
    "step_newton_iters_max";

std::string csv_line(const DiagnosticsRecord& r);

/// 𝓛 = ½‖θ‖² + ½(κχ,χ) − ½(J[χ],χ) + ∫W(χ). The nonlocal quadratic part
/// equals the pair double sum ∬ k(x−y)|χ(x)−χ(y)|²/4 by evenness of k.
double lyapunov(const SystemState& state, const NonlocalOperator& op,
                const PotentialSpec& potential);

/// The κ/J-form nonlocal interaction energy ½(κχ,χ) − ½(J[χ],χ).
double interaction_energy(const NonlocalOperator& op, const ScalarField& chi);

/// 𝓔 = ½‖θ‖² + ξ/2‖∇θ‖² + η/2‖χ‖² + ½(κχ,χ) + ∫W(χ).
double script_e(const SystemState& state, double xi, double eta, const NonlocalOperator& op,
                const PotentialSpec& potential);

/// 𝓖(x) = σ/2 χ² + ½κχ² + W(χ), nodewise.
ScalarField pointwise_g(const SystemState& state, double sigma, const NonlocalOperator& op,
                        const PotentialSpec& potential);

DiagnosticsRecord make_record(const SystemState& state, const NonlocalOperator& op,
                              const PotentialSpec& potential, double xi, double eta, double sigma,
                              int newton_iters_max);

/// Fit products for the decay/absorbing/contraction experiments.
struct DecayFit {
    double c0 = 0.0;
    double beta = 0.0;
    double c1 = 0.0;
    double residual = 0.0;  // max envelope shortfall, ≥ 0 means the envelope holds
    bool success = false;
    bool degenerate = false;  // no decaying excess above the tail mean
};

/// Upper-envelope fit y(t) ≤ C₀ e^{−βt} + C₁. C₁ is the trailing-window mean;
/// β is log-linear least squares on the positive excess; C₀ is inflated so the
/// envelope holds at every sample. success requires β > 0 and envelope slack
/// ≥ −1e−6·scale.
DecayFit fit_decay_envelope(std::span<const double> t, std::span<const double> y);

/// First recorded time from which v_norm ≤ R and max_w ≤ R² hold through the
/// end of the trajectory; nullopt if the tail never satisfies the condition.
std::optional<double> absorbing_entry(std::span<const double> t, std::span<const double> v_norm,
                                      std::span<const double> max_w, double radius);

namespace ref {
/// Brute-force O(N²) pair double sum ∬ k(x−y)|χ(x)−χ(y)|²/4 (Πh)², the
/// testing twin of interaction_energy.
double interaction_energy_double_sum(const NonlocalOperator& op, const ScalarField& chi);
}  // namespace ref

}  // namespace nlpf
