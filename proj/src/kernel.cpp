#include "nlpf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlpf/errors.hpp"
#include "nlpf/fft.hpp"
#include "nlpf/parallel.hpp"

namespace nlpf {

std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Mollifier: return "mollifier";
        case KernelFamily::Table: return "table";
    }
    return "gaussian";
}

std::string to_string(ConvStrategy s) {
    return s == ConvStrategy::Direct ? "direct" : "fast";
}

double KernelSpec::evaluate_radial(double r) const {
    r = std::fabs(r);
    switch (family) {
        case KernelFamily::Gaussian:
            return amplitude * std::exp(-r * r / (2.0 * width * width));
        case KernelFamily::Mollifier: {
            const double s = r / radius;
            if (s >= 1.0) return 0.0;
            return amplitude * std::exp(-1.0 / (1.0 - s * s));
        }
        case KernelFamily::Table: {
            if (table.empty()) return 0.0;
            if (r <= table.front()[0]) return amplitude * table.front()[1];
            if (r >= table.back()[0]) return 0.0;
            auto it = std::upper_bound(table.begin(), table.end(), r,
                                       [](double x, const std::array<double, 2>& s) { return x < s[0]; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double t = (r - lo[0]) / (hi[0] - lo[0]);
            return amplitude * (lo[1] + t * (hi[1] - lo[1]));
        }
    }
    return 0.0;
}

double KernelSpec::evaluate(double dx, double dy) const {
    return evaluate_radial(std::hypot(dx, dy));
}

KernelSpec load_table_kernel(const std::filesystem::path& path, double amplitude) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kernel table '" + path.string() + "'");
    KernelSpec spec;
    spec.family = KernelFamily::Table;
    spec.amplitude = amplitude;
    spec.table_path = path.string();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double off, val;
        if (!(ls >> off)) continue;  // blank / comment-only line
        if (!(ls >> val))
            throw IoError("kernel table '" + path.string() + "' line " + std::to_string(lineno) +
                          ": expected two columns (offset value)");
        if (off < 0.0)
            throw IoError("kernel table '" + path.string() + "' line " + std::to_string(lineno) +
                          ": offsets must be >= 0 (radial profile)");
        if (!spec.table.empty() && off <= spec.table.back()[0])
            throw IoError("kernel table '" + path.string() + "' line " + std::to_string(lineno) +
                          ": offsets must be strictly ascending");
        if (!std::isfinite(val))
            throw IoError("kernel table '" + path.string() + "' line " + std::to_string(lineno) +
                          ": non-finite value");
        spec.table.push_back({off, val});
    }
    if (spec.table.size() < 2)
        throw IoError("kernel table '" + path.string() + "' needs at least two samples");
    return spec;
}

namespace {

// Offset lattice table: row-major (2n2−1)×(2n1−1), entry (d2,d1) at
// (d2+n2−1)*(2n1−1) + (d1+n1−1).
std::vector<double> tabulate_offsets(const KernelSpec& spec, const DomainGrid& grid) {
    const int n1 = grid.nodes[0];
    const int n2 = grid.nodes[1];
    const int w1 = 2 * n1 - 1;
    const int w2 = 2 * n2 - 1;
    std::vector<double> t(static_cast<std::size_t>(w1) * w2);
#pragma omp parallel for schedule(static)
    for (int d2 = -(n2 - 1); d2 <= n2 - 1; ++d2) {
        for (int d1 = -(n1 - 1); d1 <= n1 - 1; ++d1) {
            const double v = spec.evaluate(d1 * grid.spacing[0],
                                           grid.dim == 2 ? d2 * grid.spacing[1] : 0.0);
            t[static_cast<std::size_t>(d2 + n2 - 1) * w1 + (d1 + n1 - 1)] = v;
        }
    }
    for (double v : t)
        if (!std::isfinite(v)) throw NumericError("kernel is not finite on the offset range");
    return t;
}

ScalarField direct_convolve(const std::vector<double>& offsets, const DomainGrid& grid,
                            const ScalarField& v) {
    const int n1 = grid.nodes[0];
    const int n2 = grid.nodes[1];
    const int w1 = 2 * n1 - 1;
    const double weight = grid.cell_weight();
    ScalarField out = make_field(grid, FieldTag::Other);
    const double* src = v.values.data();
    double* dst = out.values.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < grid.total(); ++i) {
        const int i1 = static_cast<int>(i % n1);
        const int i2 = static_cast<int>(i / n1);
        double acc = 0.0;
        for (int j2 = 0; j2 < n2; ++j2) {
            const std::size_t trow = static_cast<std::size_t>(i2 - j2 + n2 - 1) * w1 + (n1 - 1);
            const std::size_t vrow = static_cast<std::size_t>(j2) * n1;
            for (int j1 = 0; j1 < n1; ++j1) acc += offsets[trow + i1 - j1] * src[vrow + j1];
        }
        dst[i] = acc * weight;
    }
    return out;
}

}  // namespace

ScalarField kappa_field(const KernelSpec& spec, const DomainGrid& grid) {
    const auto offsets = tabulate_offsets(spec, grid);
    ScalarField ones = make_field(grid, FieldTag::Other, 1.0);
    ScalarField kappa = direct_convolve(offsets, grid, ones);
    kappa.tag = FieldTag::Kappa;
    return kappa;
}

std::pair<double, double> kernel_bounds(const KernelSpec& spec, const DomainGrid& grid) {
    const auto offsets = tabulate_offsets(spec, grid);
    const int n1 = grid.nodes[0];
    const int n2 = grid.nodes[1];
    const int w1 = 2 * n1 - 1;
    const double weight = grid.cell_weight();
    const std::int64_t n = grid.total();
    std::vector<double> rowsum(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const int i1 = static_cast<int>(i % n1);
        const int i2 = static_cast<int>(i / n1);
        double acc = 0.0;
        for (int j2 = 0; j2 < n2; ++j2) {
            const std::size_t trow = static_cast<std::size_t>(i2 - j2 + n2 - 1) * w1 + (n1 - 1);
            for (int j1 = 0; j1 < n1; ++j1) acc += std::fabs(offsets[trow + i1 - j1]);
        }
        rowsum[static_cast<std::size_t>(i)] = acc * weight;
    }
    double k1 = 0.0;
    for (double r : rowsum) k1 = std::max(k1, r);
    const double k0 = weight * par::det_sum(rowsum);
    return {k0, k1};
}

NonlocalOperator NonlocalOperator::build(const DomainGrid& grid, const KernelSpec& spec,
                                         ConvStrategy strategy) {
    NonlocalOperator op;
    op.grid_ = grid;
    op.spec_ = spec;
    op.strategy_ = strategy;
    op.offsets_ = tabulate_offsets(spec, grid);

    ScalarField ones = make_field(grid, FieldTag::Other, 1.0);
    op.kappa_ = direct_convolve(op.offsets_, grid, ones);
    op.kappa_.tag = FieldTag::Kappa;
    op.kappa_min_ = op.kappa_.values[0];
    op.kappa_max_ = op.kappa_.values[0];
    for (double v : op.kappa_.values) {
        op.kappa_min_ = std::min(op.kappa_min_, v);
        op.kappa_max_ = std::max(op.kappa_max_, v);
    }
    std::tie(op.k0_, op.k1_) = kernel_bounds(spec, grid);

    // fast-path plan: spectrum of the embedded offset table
    const int n1 = grid.nodes[0];
    const int n2 = grid.nodes[1];
    const int m1 = fft::next_pow2(2 * n1 - 1);
    const int m2 = grid.dim == 2 ? fft::next_pow2(2 * n2 - 1) : 1;
    op.plan_.padded = {m1, m2};
    std::vector<std::complex<double>> khat(static_cast<std::size_t>(m1) * m2, {0.0, 0.0});
    const int w1 = 2 * n1 - 1;
    for (int d2 = 0; d2 < 2 * n2 - 1; ++d2)
        for (int d1 = 0; d1 < w1; ++d1)
            khat[static_cast<std::size_t>(d2) * m1 + d1] = op.offsets_[static_cast<std::size_t>(d2) * w1 + d1];
    fft::transform_rows(khat, m2, m1, false);
    if (grid.dim == 2) fft::transform_cols(khat, m2, m1, false);
    op.plan_.kernel_hat = std::move(khat);
    return op;
}

ScalarField NonlocalOperator::apply(const ScalarField& v) const {
    return strategy_ == ConvStrategy::Direct ? apply_direct(v) : apply_fast(v);
}

ScalarField NonlocalOperator::apply_direct(const ScalarField& v) const {
    if (!(v.grid == grid_)) throw NumericError("grid mismatch in convolution");
    return direct_convolve(offsets_, grid_, v);
}

ScalarField NonlocalOperator::apply_fast(const ScalarField& v) const {
    if (!(v.grid == grid_)) throw NumericError("grid mismatch in convolution");
    const int n1 = grid_.nodes[0];
    const int n2 = grid_.nodes[1];
    const int m1 = plan_.padded[0];
    const int m2 = plan_.padded[1];
    std::vector<std::complex<double>> work(static_cast<std::size_t>(m1) * m2, {0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (int j2 = 0; j2 < n2; ++j2)
        for (int j1 = 0; j1 < n1; ++j1)
            work[static_cast<std::size_t>(j2) * m1 + j1] = v.values[static_cast<std::size_t>(j2) * n1 + j1];
    fft::transform_rows(work, m2, m1, false);
    if (grid_.dim == 2) fft::transform_cols(work, m2, m1, false);
    const std::int64_t total = static_cast<std::int64_t>(work.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) work[i] *= plan_.kernel_hat[i];
    if (grid_.dim == 2) fft::transform_cols(work, m2, m1, true);
    fft::transform_rows(work, m2, m1, true);
    const double scale = grid_.cell_weight() / (static_cast<double>(m1) * m2);
    ScalarField out = make_field(grid_, FieldTag::Other);
#pragma omp parallel for schedule(static)
    for (int i2 = 0; i2 < n2; ++i2) {
        const int s2 = grid_.dim == 2 ? i2 + n2 - 1 : 0;
        for (int i1 = 0; i1 < n1; ++i1) {
            out.values[static_cast<std::size_t>(i2) * n1 + i1] =
                work[static_cast<std::size_t>(s2) * m1 + (i1 + n1 - 1)].real() * scale;
        }
    }
    return out;
}

double NonlocalOperator::offset_value(int d1, int d2) const {
    const int n1 = grid_.nodes[0];
    const int n2 = grid_.nodes[1];
    const int w1 = 2 * n1 - 1;
    return offsets_[static_cast<std::size_t>(d2 + n2 - 1) * w1 + (d1 + n1 - 1)];
}

namespace ref {

ScalarField convolve_direct(const KernelSpec& spec, const ScalarField& v) {
    const DomainGrid& g = v.grid;
    ScalarField out = make_field(g, FieldTag::Other);
    const double weight = g.cell_weight();
    for (std::int64_t i = 0; i < g.total(); ++i) {
        const auto xi = g.coordinate(i);
        double acc = 0.0;
        for (std::int64_t j = 0; j < g.total(); ++j) {
            const auto xj = g.coordinate(j);
            acc += spec.evaluate(xi[0] - xj[0], xi[1] - xj[1]) * v.values[j];
        }
        out.values[i] = acc * weight;
    }
    return out;
}

}  // namespace ref

}  // namespace nlpf
