#include "nlpf/grid.hpp"

#include <cmath>
#include <cstdio>

#include "nlpf/errors.hpp"
#include "nlpf/parallel.hpp"

namespace nlpf {

std::string to_string(FieldTag tag) {
    switch (tag) {
        case FieldTag::Theta: return "theta";
        case FieldTag::Chi: return "chi";
        case FieldTag::Source: return "source";
        case FieldTag::Kappa: return "kappa";
        case FieldTag::Other: return "other";
    }
    return "other";
}

FieldTag field_tag_from_string(const std::string& s) {
    if (s == "theta") return FieldTag::Theta;
    if (s == "chi") return FieldTag::Chi;
    if (s == "source") return FieldTag::Source;
    if (s == "kappa") return FieldTag::Kappa;
    if (s == "other") return FieldTag::Other;
    throw IoError("unknown field tag '" + s + "'");
}

DomainGrid build_grid(int dim, std::span<const double> lengths, std::span<const int> node_counts) {
    if (dim != 1 && dim != 2)
        throw ConfigError("unsupported dimension " + std::to_string(dim) + " (grid supports d = 1 or 2)");
    if (lengths.size() != static_cast<std::size_t>(dim) ||
        node_counts.size() != static_cast<std::size_t>(dim))
        throw ConfigError("grid: expected " + std::to_string(dim) + " lengths and node counts");
    DomainGrid g;
    g.dim = dim;
    g.nodes = {1, 1};
    for (int ax = 0; ax < dim; ++ax) {
        if (!(lengths[ax] > 0.0) || !std::isfinite(lengths[ax]))
            throw ConfigError("grid: side length must be positive and finite");
        if (node_counts[ax] < 3)
            throw ConfigError("grid: node count must be >= 3");
        g.length[ax] = lengths[ax];
        g.nodes[ax] = node_counts[ax];
        g.spacing[ax] = lengths[ax] / (node_counts[ax] + 1);
    }
    if (dim == 1) {
        g.length[1] = 1.0;
        g.spacing[1] = 0.0;
    }
    return g;
}

ScalarField make_field(const DomainGrid& grid, FieldTag tag, double fill) {
    ScalarField f;
    f.grid = grid;
    f.tag = tag;
    f.values.assign(static_cast<std::size_t>(grid.total()), fill);
    return f;
}

void validate_field(const ScalarField& f) {
    if (f.values.size() != static_cast<std::size_t>(f.grid.total()))
        throw NumericError("field length " + std::to_string(f.values.size()) +
                           " does not match grid node count " + std::to_string(f.grid.total()));
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!std::isfinite(f.values[i]))
            throw NumericError("non-finite value at node " + std::to_string(i));
        if (f.tag == FieldTag::Chi && !(std::fabs(f.values[i]) < 1.0))
            throw NumericError("chi invariant |value| < 1 violated at node " + std::to_string(i) +
                               " (value = " + std::to_string(f.values[i]) + ")");
    }
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw NumericError("grid mismatch between fields");
}

ScalarField apply_neg_laplacian(const ScalarField& v) {
    if (v.values.size() != static_cast<std::size_t>(v.grid.total()))
        throw NumericError("field length does not match grid");
    const DomainGrid& g = v.grid;
    ScalarField out = make_field(g, FieldTag::Other);
    const int n1 = g.nodes[0];
    const int n2 = g.nodes[1];
    const double ih1 = 1.0 / (g.spacing[0] * g.spacing[0]);
    const double ih2 = g.dim == 2 ? 1.0 / (g.spacing[1] * g.spacing[1]) : 0.0;
    const double* src = v.values.data();
    double* dst = out.values.data();
    if (g.dim == 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n1; ++i) {
            const double left = i > 0 ? src[i - 1] : 0.0;
            const double right = i < n1 - 1 ? src[i + 1] : 0.0;
            dst[i] = (2.0 * src[i] - left - right) * ih1;
        }
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t i2 = 0; i2 < n2; ++i2) {
            for (std::int64_t i1 = 0; i1 < n1; ++i1) {
                const std::int64_t idx = i2 * n1 + i1;
                const double left = i1 > 0 ? src[idx - 1] : 0.0;
                const double right = i1 < n1 - 1 ? src[idx + 1] : 0.0;
                const double down = i2 > 0 ? src[idx - n1] : 0.0;
                const double up = i2 < n2 - 1 ? src[idx + n1] : 0.0;
                dst[idx] = (2.0 * src[idx] - left - right) * ih1 +
                           (2.0 * src[idx] - down - up) * ih2;
            }
        }
    }
    return out;
}

double inner(const ScalarField& u, const ScalarField& v) {
    require_same_grid(u, v);
    return u.grid.cell_weight() * par::det_dot(u.values, v.values);
}

double norm_l2(const ScalarField& v) {
    return std::sqrt(v.grid.cell_weight() * par::det_dot(v.values, v.values));
}

double norm_v_sq(const ScalarField& v) {
    const ScalarField av = apply_neg_laplacian(v);
    const double q = v.grid.cell_weight() * par::det_dot(av.values, v.values);
    return q > 0.0 ? q : 0.0;
}

double norm_v(const ScalarField& v) { return std::sqrt(norm_v_sq(v)); }

double max_abs(const ScalarField& v) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(v.values.size()); ++i) {
        const double a = std::fabs(v.values[i]);
        if (a > m) m = a;
    }
    return m;
}

namespace ref {

ScalarField apply_neg_laplacian(const ScalarField& v) {
    const DomainGrid& g = v.grid;
    ScalarField out = make_field(g, FieldTag::Other);
    const int n1 = g.nodes[0];
    const int n2 = g.nodes[1];
    const double ih1 = 1.0 / (g.spacing[0] * g.spacing[0]);
    const double ih2 = g.dim == 2 ? 1.0 / (g.spacing[1] * g.spacing[1]) : 0.0;
    for (int i2 = 0; i2 < n2; ++i2) {
        for (int i1 = 0; i1 < n1; ++i1) {
            const std::int64_t idx = g.index(i1, i2);
            const double left = i1 > 0 ? v.values[idx - 1] : 0.0;
            const double right = i1 < n1 - 1 ? v.values[idx + 1] : 0.0;
            double acc = (2.0 * v.values[idx] - left - right) * ih1;
            if (g.dim == 2) {
                const double down = i2 > 0 ? v.values[idx - n1] : 0.0;
                const double up = i2 < n2 - 1 ? v.values[idx + n1] : 0.0;
                acc += (2.0 * v.values[idx] - down - up) * ih2;
            }
            out.values[idx] = acc;
        }
    }
    return out;
}

std::vector<double> dense_neg_laplacian(const DomainGrid& grid) {
    const std::int64_t n = grid.total();
    std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
    const int n1 = grid.nodes[0];
    const int n2 = grid.nodes[1];
    const double ih1 = 1.0 / (grid.spacing[0] * grid.spacing[0]);
    const double ih2 = grid.dim == 2 ? 1.0 / (grid.spacing[1] * grid.spacing[1]) : 0.0;
    for (int i2 = 0; i2 < n2; ++i2) {
        for (int i1 = 0; i1 < n1; ++i1) {
            const std::int64_t r = grid.index(i1, i2);
            double diag = 2.0 * ih1 + (grid.dim == 2 ? 2.0 * ih2 : 0.0);
            m[r * n + r] = diag;
            if (i1 > 0) m[r * n + (r - 1)] = -ih1;
            if (i1 < n1 - 1) m[r * n + (r + 1)] = -ih1;
            if (grid.dim == 2 && i2 > 0) m[r * n + (r - n1)] = -ih2;
            if (grid.dim == 2 && i2 < n2 - 1) m[r * n + (r + n1)] = -ih2;
        }
    }
    return m;
}

}  // namespace ref

}  // namespace nlpf
