#include "nlpf/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlpf/errors.hpp"
#include "nlpf/parallel.hpp"

namespace nlpf {

Spectrum eigendecompose(const NonlocalOperator& op, int node_cap) {
    const DomainGrid& grid = op.grid();
    const std::int64_t n = grid.total();
    if (n > node_cap)
        throw NumericError("dense eigendecomposition capped at " + std::to_string(node_cap) +
                           " nodes but grid has " + std::to_string(n) +
                           "; use a smaller grid (or raise kernel.eigen_cap)");
    const int n1 = grid.nodes[0];
    const double weight = grid.cell_weight();

    Eigen::MatrixXd jm(n, n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const int i1 = static_cast<int>(i % n1);
        const int i2 = static_cast<int>(i / n1);
        for (std::int64_t j = 0; j < n; ++j) {
            const int j1 = static_cast<int>(j % n1);
            const int j2 = static_cast<int>(j / n1);
            jm(i, j) = op.offset_value(i1 - j1, i2 - j2) * weight;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed to converge");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::fabs(es.eigenvalues()[a]) > std::fabs(es.eigenvalues()[b]);
    });

    Spectrum sp;
    sp.eigenvalues.resize(static_cast<std::size_t>(n));
    sp.eigenfields.assign(static_cast<std::size_t>(n),
                          std::vector<double>(static_cast<std::size_t>(n)));
    // Eigen returns Euclidean-orthonormal columns; rescale so the fields are
    // orthonormal in the quadrature-weighted inner product.
    const double rescale = 1.0 / std::sqrt(weight);
    for (std::int64_t k = 0; k < n; ++k) {
        sp.eigenvalues[k] = es.eigenvalues()[order[k]];
        const auto col = es.eigenvectors().col(order[k]);
        for (std::int64_t i = 0; i < n; ++i) sp.eigenfields[k][i] = col[i] * rescale;
    }

    // Residuals through the operator's own apply path cross-checks the dense
    // assembly against the convolution code.
    double max_res = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        ScalarField e = make_field(grid, FieldTag::Other);
        e.values = sp.eigenfields[k];
        ScalarField je = op.apply_direct(e);
        double num = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const double d = je.values[i] - sp.eigenvalues[k] * e.values[i];
            num += d * d;
        }
        max_res = std::max(max_res, std::sqrt(weight * num));  // ‖e‖ = 1
    }
    sp.max_residual = max_res;
    return sp;
}

double lambda0(const NonlocalOperator& op, const PotentialSpec& potential) {
    return op.kappa_min() - potential.lambda();
}

double monotonicity_margin(const NonlocalOperator& op, const PotentialSpec& potential) {
    return op.kappa_min() + potential.min_d2w();
}

Projector Projector::build(const NonlocalOperator& op, const Spectrum& spectrum, double lambda0,
                           double c_lambda0) {
    if (!(lambda0 > 0.0)) throw NumericError("assumption (Wconv) violated: lambda0 must be > 0");
    if (!(c_lambda0 > 0.0)) throw NumericError("c_lambda0 must be > 0");
    Projector p;
    p.grid_ = op.grid();
    p.lambda0_ = lambda0;
    p.c_lambda0_ = c_lambda0;
    p.threshold_ = lambda0 / (4.0 * c_lambda0);
    for (std::size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
        const double mu = spectrum.eigenvalues[k];
        if (mu * mu > p.threshold_) {
            p.eigenvalues_.push_back(mu);
            p.eigenfields_.push_back(spectrum.eigenfields[k]);
        }
    }
    return p;
}

std::vector<double> Projector::coefficients(const ScalarField& v) const {
    if (!(v.grid == grid_)) throw NumericError("grid mismatch in projector");
    const double weight = grid_.cell_weight();
    std::vector<double> c(eigenvalues_.size());
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k)
        c[k] = weight * par::det_dot(eigenfields_[k], v.values);
    return c;
}

ScalarField Projector::apply(const ScalarField& v) const {
    const auto c = coefficients(v);
    ScalarField out = make_field(grid_, FieldTag::Other);
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
        const double a = eigenvalues_[k] * c[k];
        const auto& e = eigenfields_[k];
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += a * e[i];
    }
    return out;
}

double Projector::norm_applied(const ScalarField& v) const {
    const auto c = coefficients(v);
    double s = 0.0;
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
        const double a = eigenvalues_[k] * c[k];
        s += a * a;
    }
    return std::sqrt(s);
}

}  // namespace nlpf
