#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nlpf/grid.hpp"

namespace nlpf {

enum class KernelFamily { Gaussian, Mollifier, Table };
enum class ConvStrategy { Direct, Fast };

std::string to_string(KernelFamily f);
std::string to_string(ConvStrategy s);

/// Interaction kernel k(x) = k(−x). All families are radial, so evenness
/// holds by construction.
///   gaussian:  k(x) = a·exp(−|x|²/(2w²))
///   mollifier: k(x) = a·exp(−1/(1−(|x|/r₀)²)) for |x| < r₀, else 0
///   table:     radial profile from ascending (offset ≥ 0, value) samples,
///              linearly interpolated, 0 beyond the last sample
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double amplitude = 1.0;
    double width = 0.1;   // gaussian
    double radius = 0.1;  // mollifier support radius r0
    std::vector<std::array<double, 2>> table;
    std::string table_path;  // provenance echo for configs

    double evaluate_radial(double r) const;
    double evaluate(double dx, double dy = 0.0) const;

    bool operator==(const KernelSpec&) const = default;
};

KernelSpec load_table_kernel(const std::filesystem::path& path, double amplitude = 1.0);

/// The spec op κ(x) = Σ_j k(x − x_j)·Πh, i.e. J applied to the constant 1
/// through the direct summation path (the operator's stored κ is produced by
/// the identical code path).
ScalarField kappa_field(const KernelSpec& spec, const DomainGrid& grid);

/// Discrete (k₀, k₁): k₀ = Σ_i Σ_j |k(x_i−x_j)| (Πh)², k₁ = max_i Σ_j |k| Πh.
std::pair<double, double> kernel_bounds(const KernelSpec& spec, const DomainGrid& grid);

/// Discretized convolution operator J[v](x_i) = Σ_j k(x_i−x_j) v(x_j) Πh.
/// The kernel is tabulated once on the offset lattice; the matrix it induces
/// is exactly symmetric because k is even. Immutable after construction;
/// apply() is reentrant.
class NonlocalOperator {
public:
    static NonlocalOperator build(const DomainGrid& grid, const KernelSpec& spec,
                                  ConvStrategy strategy = ConvStrategy::Fast);

    const DomainGrid& grid() const { return grid_; }
    const KernelSpec& spec() const { return spec_; }
    ConvStrategy strategy() const { return strategy_; }

    const ScalarField& kappa() const { return kappa_; }
    double kappa_min() const { return kappa_min_; }
    double kappa_max() const { return kappa_max_; }
    double k0() const { return k0_; }
    double k1() const { return k1_; }

    ScalarField apply(const ScalarField& v) const;
    ScalarField apply_direct(const ScalarField& v) const;
    ScalarField apply_fast(const ScalarField& v) const;

    /// Tabulated k((d1·h1, d2·h2)); |d_i| < n_i.
    double offset_value(int d1, int d2 = 0) const;

private:
    NonlocalOperator() = default;

    DomainGrid grid_;
    KernelSpec spec_;
    ConvStrategy strategy_ = ConvStrategy::Fast;
    std::vector<double> offsets_;  // (2n2−1) rows × (2n1−1) cols, row-major
    ScalarField kappa_;
    double kappa_min_ = 0.0, kappa_max_ = 0.0, k0_ = 0.0, k1_ = 0.0;

    // Zero-padded circular convolution of size next_pow2(2n_i − 1) per axis;
    // padding ≥ 2n−1 makes the needed window alias-free (linear convolution
    // on the bounded domain, no periodic wraparound).
    struct FastPlan {
        std::array<int, 2> padded{1, 1};
        std::vector<std::complex<double>> kernel_hat;
    };
    FastPlan plan_;
};

namespace ref {
/// Brute-force O(N²) quadrature convolution evaluating the kernel directly
/// (no shared tables with the operator). Test oracle and benchmark reference.
ScalarField convolve_direct(const KernelSpec& spec, const ScalarField& v);
}  // namespace ref

}  // namespace nlpf
