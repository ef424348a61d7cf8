#pragma once

#include <vector>

#include "nlpf/grid.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/potential.hpp"

namespace nlpf {

/// Full symmetric eigendecomposition of the dense convolution matrix.
/// Eigenvalues sorted by |μ| descending; eigenfields orthonormal in the
/// quadrature-weighted inner product.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenfields;
    double max_residual = 0.0;  // max ‖J e − μ e‖ / ‖e‖, discrete norms
};

inline constexpr int kDefaultEigenCap = 4096;

Spectrum eigendecompose(const NonlocalOperator& op, int node_cap = kDefaultEigenCap);

/// λ₀ := κ_min − λ. Sign is reported, never an error: positivity gates the
/// attractor experiments, not the plain solver.
double lambda0(const NonlocalOperator& op, const PotentialSpec& potential);

/// Sharp pointwise-monotonicity margin κ_min + inf W″ (equals λ₀ when the
/// potential's inf W″ is the active −λ bound, stronger for convex W).
double monotonicity_margin(const NonlocalOperator& op, const PotentialSpec& potential);

/// Finite-rank spectral truncation Π[v] = Σ_kept μ_i ⟨v,e_i⟩ e_i over the
/// modes with μ_i² above the threshold λ₀/(4 c_{λ₀}). By the spectral
/// decomposition ‖Jv‖² = Σ μ_i² ⟨v,e_i⟩², so
///   ‖Jv‖² ≤ (λ₀/(4 c_{λ₀})) ‖v‖² + ‖Πv‖²
/// holds with nonnegative slack up to eigensolver residual, at minimal rank.
class Projector {
public:
    static Projector build(const NonlocalOperator& op, const Spectrum& spectrum, double lambda0,
                           double c_lambda0);

    int rank() const { return static_cast<int>(eigenvalues_.size()); }
    double threshold() const { return threshold_; }
    double lambda0_value() const { return lambda0_; }
    double c_lambda0() const { return c_lambda0_; }

    ScalarField apply(const ScalarField& v) const;
    /// Retained-mode coordinates ⟨v, e_i⟩ (length rank()).
    std::vector<double> coefficients(const ScalarField& v) const;
    /// ‖Πv‖ from coordinates without forming the field.
    double norm_applied(const ScalarField& v) const;
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

private:
    DomainGrid grid_;
    double threshold_ = 0.0;
    double lambda0_ = 0.0;
    double c_lambda0_ = 1.0;
    std::vector<double> eigenvalues_;
    std::vector<std::vector<double>> eigenfields_;
};

}  // namespace nlpf
