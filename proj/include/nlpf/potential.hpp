#pragma once

#include <string>
#include <vector>

namespace nlpf {

enum class PotentialFamily { HardLog, DoubleLog };

std::string to_string(PotentialFamily f);

/// Singular configuration potential on (−1, 1).
///
///   hardlog:   W(r) = −c₁ ln(1−r²) − (λ_w/2) r² + c₀,  c₀ chosen so min W = 0
///   doublelog: W(r) = (1+r)ln(1+r) + (1−r)ln(1−r) − (λ/2) r²
///
/// The semiconvexity constant λ = max(0, sup(−W″) + 1e−9) is computed at
/// construction by sampling (Chebyshev nodes plus r = 0, where both families
/// attain the sup), never user-declared. hardlog blows up at ±1 and satisfies
/// the positivity assumption after the offset; doublelog is bounded on [−1,1]
/// and is therefore rejected by separation_radius.
class PotentialSpec {
public:
    static PotentialSpec hard_log(double c1, double lambda_w);
    static PotentialSpec double_log(double lambda_param);

    double w(double r) const;
    double dw(double r) const;
    double d2w(double r) const;

    PotentialFamily family() const { return family_; }
    double c1() const { return c1_; }
    double lambda_w() const { return lambda_w_; }
    double lambda_param() const { return lambda_param_; }
    double offset() const { return c0_; }

    /// Computed semiconvexity constant λ (≥ 0) with W″ ≥ −λ.
    double lambda() const { return lambda_; }
    /// Sampled inf W″ over (−1,1); positive for convex potentials. The sharp
    /// monotonicity margin for the pointwise solves is κ_min + min_d2w().
    double min_d2w() const { return min_d2w_; }
    double w0() const { return w0_; }
    bool satisfies_w1() const { return satisfies_w1_; }

    /// Copy with an overridden λ (for validation experiments; breaks the
    /// computed-λ guarantee on purpose).
    PotentialSpec with_lambda(double lambda) const;

    /// Solver guard band: evaluations are confined to |r| ≤ 1 − ε_g.
    static constexpr double kGuardBand = 1e-14;

    bool operator==(const PotentialSpec&) const = default;

private:
    PotentialSpec() = default;
    void finalize();
    void check_domain(double r) const;

    PotentialFamily family_ = PotentialFamily::HardLog;
    double c1_ = 1.0;
    double lambda_w_ = 0.0;
    double lambda_param_ = 0.0;
    double c0_ = 0.0;
    double lambda_ = 0.0;
    double min_d2w_ = 0.0;
    double w0_ = 0.0;
    bool satisfies_w1_ = true;
};

struct PotentialCheckReport {
    bool passed = false;
    double min_slack = 0.0;
    double witness_r = 0.0;  // argmin of the slack
    int samples = 0;
};

/// Semiconvexity: min over samples of W″(r) + λ must be ≥ −1e−12.
PotentialCheckReport check_semiconvexity(const PotentialSpec& spec, int sample_count);

/// Derivative product bound W′(r)r ≥ W(r) − λr²/2 − W(0) (a consequence of
/// semiconvexity): slack must be ≥ −1e−10 at all samples.
PotentialCheckReport check_w25(const PotentialSpec& spec, int sample_count);

/// Largest δ ∈ (0,1) with {W ≤ W_max} ⊆ [−1+δ, 1−δ], by bisection on the
/// monotone outer branch. Requires a potential that blows up at ±1.
double separation_radius(const PotentialSpec& spec, double w_max);

}  // namespace nlpf
