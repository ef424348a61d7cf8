#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nlpf {

enum class FieldTag { Theta, Chi, Source, Kappa, Other };

std::string to_string(FieldTag tag);
FieldTag field_tag_from_string(const std::string& s);

/// Uniform lattice of interior nodes on the open box Ω = Π(0, L_i), d ∈ {1,2}.
/// Homogeneous Dirichlet values live on the boundary and are identically 0;
/// they are never stored. Spacing h_i = L_i/(n_i+1).
///
/// Node ordering is lexicographic with axis 0 fastest:
///   index(i1, i2) = i2*n1 + i1,  coordinate = ((i1+1)h1, (i2+1)h2).
/// Every module relies on this order; the snapshot format stores values in it.
struct DomainGrid {
    int dim = 1;
    std::array<double, 2> length{1.0, 1.0};
    std::array<int, 2> nodes{0, 1};  // n2 == 1 in 1D
    std::array<double, 2> spacing{0.0, 0.0};

    std::int64_t total() const { return static_cast<std::int64_t>(nodes[0]) * nodes[1]; }
    double cell_weight() const { return dim == 1 ? spacing[0] : spacing[0] * spacing[1]; }
    double volume() const { return static_cast<double>(total()) * cell_weight(); }

    std::int64_t index(int i1, int i2 = 0) const {
        return static_cast<std::int64_t>(i2) * nodes[0] + i1;
    }
    std::array<double, 2> coordinate(std::int64_t idx) const {
        const int i1 = static_cast<int>(idx % nodes[0]);
        const int i2 = static_cast<int>(idx / nodes[0]);
        return {(i1 + 1) * spacing[0], dim == 2 ? (i2 + 1) * spacing[1] : 0.0};
    }

    bool operator==(const DomainGrid&) const = default;
};

DomainGrid build_grid(int dim, std::span<const double> lengths, std::span<const int> node_counts);

/// Grid-sampled function. Carries its grid by value (a few words) so fields
/// are self-contained.
struct ScalarField {
    DomainGrid grid;
    FieldTag tag = FieldTag::Other;
    std::vector<double> values;
};

ScalarField make_field(const DomainGrid& grid, FieldTag tag, double fill = 0.0);

/// Throws NumericError if any value is non-finite, or if tag == Chi and any
/// |value| >= 1 (reported with the offending node index; never clamped).
void validate_field(const ScalarField& f);

void require_same_grid(const ScalarField& a, const ScalarField& b);

/// Discrete A = −Δ with the (2d+1)-point stencil and zero Dirichlet ghosts.
ScalarField apply_neg_laplacian(const ScalarField& v);

/// Quadrature-weighted inner product (weight Π h_i) and induced norms.
double inner(const ScalarField& u, const ScalarField& v);
double norm_l2(const ScalarField& v);
/// ‖v‖_V² = ⟨Av, v⟩ (clamped at 0 against rounding for v ≈ 0).
double norm_v_sq(const ScalarField& v);
double norm_v(const ScalarField& v);
double max_abs(const ScalarField& v);

namespace ref {
/// Serial stencil twin of apply_neg_laplacian (testing/benchmark reference).
ScalarField apply_neg_laplacian(const ScalarField& v);
/// Dense assembly of the stencil matrix, row-major N×N. Test oracle; keep N small.
std::vector<double> dense_neg_laplacian(const DomainGrid& grid);
}  // namespace ref

}  // namespace nlpf
