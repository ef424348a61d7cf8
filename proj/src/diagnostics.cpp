#include "nlpf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nlpf/errors.hpp"
#include "nlpf/parallel.hpp"

namespace nlpf {

std::string csv_line(const DiagnosticsRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d", r.t, r.l2_theta,
                  r.v_theta, r.l2_chi, r.max_abs_chi, r.delta_margin, r.lyapunov, r.script_e,
                  r.l2_chit, r.newton_iters_max);
    return buf;
}

double interaction_energy(const NonlocalOperator& op, const ScalarField& chi) {
    const ScalarField conv = op.apply(chi);
    ScalarField chi_sq = make_field(chi.grid, FieldTag::Other);
    for (std::size_t i = 0; i < chi_sq.values.size(); ++i)
        chi_sq.values[i] = chi.values[i] * chi.values[i];
    return 0.5 * inner(op.kappa(), chi_sq) - 0.5 * inner(conv, chi);
}

namespace {

double potential_integral(const PotentialSpec& potential, const ScalarField& chi) {
    std::vector<double> w(chi.values.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = potential.w(chi.values[i]);
    return chi.grid.cell_weight() * par::det_sum(w);
}

}  // namespace

double lyapunov(const SystemState& state, const NonlocalOperator& op,
                const PotentialSpec& potential) {
    const double theta_sq = inner(state.theta, state.theta);
    return 0.5 * theta_sq + interaction_energy(op, state.chi) +
           potential_integral(potential, state.chi);
}

double script_e(const SystemState& state, double xi, double eta, const NonlocalOperator& op,
                const PotentialSpec& potential) {
    if (!(xi > 0.0) || !(eta > 0.0)) throw ConfigError("script_e requires xi > 0 and eta > 0");
    ScalarField chi_sq = state.chi;
    for (std::size_t i = 0; i < chi_sq.values.size(); ++i)
        chi_sq.values[i] = state.chi.values[i] * state.chi.values[i];
    return 0.5 * inner(state.theta, state.theta) + 0.5 * xi * norm_v_sq(state.theta) +
           0.5 * eta * inner(state.chi, state.chi) + 0.5 * inner(op.kappa(), chi_sq) +
           potential_integral(potential, state.chi);
}

ScalarField pointwise_g(const SystemState& state, double sigma, const NonlocalOperator& op,
                        const PotentialSpec& potential) {
    if (!(sigma > 0.0)) throw ConfigError("pointwise_g requires sigma > 0");
    ScalarField g = make_field(state.chi.grid, FieldTag::Other);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double c = state.chi.values[i];
        g.values[i] = 0.5 * sigma * c * c + 0.5 * op.kappa().values[i] * c * c + potential.w(c);
    }
    return g;
}

DiagnosticsRecord make_record(const SystemState& state, const NonlocalOperator& op,
                              const PotentialSpec& potential, double xi, double eta, double sigma,
                              int newton_iters_max) {
    DiagnosticsRecord r;
    r.t = state.time;
    r.l2_theta = norm_l2(state.theta);
    r.v_theta = norm_v(state.theta);
    r.l2_chi = norm_l2(state.chi);
    r.max_abs_chi = max_abs(state.chi);
    r.delta_margin = 1.0 - r.max_abs_chi;
    r.lyapunov = lyapunov(state, op, potential);
    r.script_e = script_e(state, xi, eta, op, potential);
    r.l2_chit = norm_l2(state.chi_t);
    r.newton_iters_max = newton_iters_max;
    r.min_chi = *std::min_element(state.chi.values.begin(), state.chi.values.end());
    r.max_chi = *std::max_element(state.chi.values.begin(), state.chi.values.end());
    r.max_w = 0.0;
    for (double c : state.chi.values) r.max_w = std::max(r.max_w, potential.w(c));
    const ScalarField g = pointwise_g(state, sigma, op, potential);
    r.max_g = *std::max_element(g.values.begin(), g.values.end());
    return r;
}

DecayFit fit_decay_envelope(std::span<const double> t, std::span<const double> y) {
    DecayFit fit;
    const std::size_t n = t.size();
    if (n < 4 || y.size() != n) throw ConfigError("fit_decay_envelope needs >= 4 samples");

    // C1: trailing-window mean (last 20%, at least 2 samples).
    const std::size_t tail = std::max<std::size_t>(2, n / 5);
    double c1 = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) c1 += y[i];
    c1 /= static_cast<double>(tail);
    fit.c1 = c1;

    double zmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) zmax = std::max(zmax, y[i] - c1);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(y[i]));
    if (zmax <= std::max(1e-12, 1e-9 * scale)) {
        // flat data: no decaying excess to fit
        fit.c0 = 0.0;
        fit.beta = 0.0;
        fit.degenerate = true;
        fit.success = false;
        fit.residual = 0.0;
        return fit;
    }

    // log-linear least squares on the well-resolved excess
    const double floor = 1e-2 * zmax;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = y[i] - c1;
        if (z <= floor) continue;
        const double ly = std::log(z);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        ++m;
    }
    if (m < 2) {
        fit.degenerate = true;
        fit.success = false;
        return fit;
    }
    const double denom = m * sxx - sx * sx;
    if (denom <= 0.0) {
        fit.degenerate = true;
        fit.success = false;
        return fit;
    }
    const double slope = (m * sxy - sx * sy) / denom;
    fit.beta = -slope;

    if (!(fit.beta > 0.0)) {
        fit.success = false;
        fit.c0 = std::exp((sy - slope * sx) / m);
        return fit;
    }
    // inflate C0 so the envelope holds at every sample
    double c0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = y[i] - c1;
        if (z > 0.0) c0 = std::max(c0, z * std::exp(fit.beta * t[i]));
    }
    fit.c0 = c0;
    double shortfall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double env = fit.c0 * std::exp(-fit.beta * t[i]) + fit.c1;
        shortfall = std::min(shortfall, env - y[i]);
    }
    fit.residual = shortfall;  // >= 0 when the envelope holds everywhere
    fit.success = shortfall >= -1e-6 * std::max(scale, 1.0);
    return fit;
}

std::optional<double> absorbing_entry(std::span<const double> t, std::span<const double> v_norm,
                                      std::span<const double> max_w, double radius) {
    if (!(radius > 0.0)) throw ConfigError("absorbing_entry requires R > 0");
    const std::size_t n = t.size();
    if (v_norm.size() != n || max_w.size() != n) throw ConfigError("absorbing_entry: ragged input");
    const double r_sq = radius * radius;
    std::ptrdiff_t last_bad = -1;
    for (std::size_t i = 0; i < n; ++i)
        if (!(v_norm[i] <= radius && max_w[i] <= r_sq)) last_bad = static_cast<std::ptrdiff_t>(i);
    if (last_bad + 1 >= static_cast<std::ptrdiff_t>(n)) return std::nullopt;
    return t[static_cast<std::size_t>(last_bad + 1)];
}

namespace ref {

double interaction_energy_double_sum(const NonlocalOperator& op, const ScalarField& chi) {
    const DomainGrid& g = chi.grid;
    const double w2 = g.cell_weight() * g.cell_weight();
    const int n1 = g.nodes[0];
    double acc = 0.0;
    for (std::int64_t i = 0; i < g.total(); ++i) {
        const int i1 = static_cast<int>(i % n1);
        const int i2 = static_cast<int>(i / n1);
        for (std::int64_t j = 0; j < g.total(); ++j) {
            const int j1 = static_cast<int>(j % n1);
            const int j2 = static_cast<int>(j / n1);
            const double d = chi.values[i] - chi.values[j];
            acc += op.offset_value(i1 - j1, i2 - j2) * d * d;
        }
    }
    return 0.25 * acc * w2;
}

}  // namespace ref

}  // namespace nlpf
