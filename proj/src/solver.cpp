#include "nlpf/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nlpf/errors.hpp"
#include "nlpf/parallel.hpp"
#include "nlpf/snapshot.hpp"

namespace nlpf {

namespace {

constexpr double kBand = 1.0 - PotentialSpec::kGuardBand;

struct NodeSolve {
    double root = 0.0;
    double residual = 0.0;
    int iters = 0;
    bool ok = false;
    const char* what = "";
};

// Safeguarded Newton for the strictly increasing g(c) = c(1 + Δt κ) + Δt W′(c) − rhs
// on [−1+ε_g, 1−ε_g]. Falls back to bisection whenever the Newton step leaves
// the bracket; the bracket is maintained by sign, so failure can only mean the
// root left the guard band.
NodeSolve solve_node(double kappa, double dt, double rhs, const PotentialSpec& pot, double guess,
                     double tol, int max_iters) {
    NodeSolve out;
    const double a = 1.0 + dt * kappa;
    auto g = [&](double c) { return a * c + dt * pot.dw(c) - rhs; };
    auto gp = [&](double c) { return a + dt * pot.d2w(c); };

    double lo = -kBand, hi = kBand;
    const double glo = g(lo);
    const double ghi = g(hi);
    if (glo > 0.0 || ghi < 0.0) {
        out.what = glo > 0.0 ? "root below -1+eps guard band" : "root above 1-eps guard band";
        return out;
    }
    double c = std::clamp(guess, lo, hi);
    double res = g(c);
    out.residual = std::fabs(res);
    for (int it = 1; it <= max_iters; ++it) {
        out.iters = it;
        if (std::fabs(res) <= tol) {
            if (!(gp(c) > 0.0)) {
                out.what = "pointwise map not increasing at root (stability gate violated)";
                return out;
            }
            out.root = c;
            out.residual = std::fabs(res);
            out.ok = true;
            return out;
        }
        if (res > 0.0)
            hi = c;
        else
            lo = c;
        const double dp = gp(c);
        double next = dp > 0.0 ? c - res / dp : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == c) {  // bracket exhausted at machine resolution
            const double mid = 0.5 * (lo + hi);
            if (mid == c) break;
            next = mid;
        }
        c = next;
        res = g(c);
        out.residual = std::fabs(res);
    }
    out.what = "Newton did not reach tolerance";
    return out;
}

// Jacobi-preconditioned CG for (I + ΔtA)x = b. The stencil diagonal is
// constant on a uniform grid, so the preconditioner is the exact diagonal.
std::pair<int, double> solve_heat(ScalarField& x, const ScalarField& b, double dt, double tol,
                                  int max_iters) {
    const DomainGrid& g = x.grid;
    const std::int64_t n = g.total();
    auto apply = [&](const ScalarField& v) {
        ScalarField av = apply_neg_laplacian(v);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) av.values[i] = v.values[i] + dt * av.values[i];
        return av;
    };
    double diag = 1.0 + dt * 2.0 / (g.spacing[0] * g.spacing[0]);
    if (g.dim == 2) diag += dt * 2.0 / (g.spacing[1] * g.spacing[1]);
    const double inv_diag = 1.0 / diag;

    ScalarField r = b;
    {
        ScalarField ax = apply(x);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) r.values[i] -= ax.values[i];
    }
    ScalarField z = r;
    for (auto& v : z.values) v *= inv_diag;
    ScalarField p = z;
    double rz = par::det_dot(r.values, z.values);
    const double bnorm = std::sqrt(par::det_dot(b.values, b.values));
    const double stop = tol * std::max(bnorm, 1e-300);
    double rnorm = std::sqrt(par::det_dot(r.values, r.values));
    int it = 0;
    while (rnorm > stop) {
        if (it >= max_iters)
            throw NumericError("linear solve stagnated: residual " + std::to_string(rnorm) +
                               " after " + std::to_string(it) + " iterations");
        ScalarField ap = apply(p);
        const double pap = par::det_dot(p.values, ap.values);
        if (!(pap > 0.0)) throw NumericError("linear solve lost positive definiteness");
        const double alpha = rz / pap;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            x.values[i] += alpha * p.values[i];
            r.values[i] -= alpha * ap.values[i];
        }
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) z.values[i] = r.values[i] * inv_diag;
        const double rz_new = par::det_dot(r.values, z.values);
        const double beta = rz_new / rz;
        rz = rz_new;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) p.values[i] = z.values[i] + beta * p.values[i];
        rnorm = std::sqrt(par::det_dot(r.values, r.values));
        ++it;
    }
    return {it, rnorm};
}

void check_stability_gate(const SimConfig& cfg, const NonlocalOperator& op,
                          const PotentialSpec& potential) {
    const double margin = op.kappa_min() + potential.min_d2w();
    if (1.0 + cfg.dt * margin <= 0.0)
        throw ConfigError("stability gate failed: 1 + dt*(kappa_min + inf W'') <= 0; require dt < " +
                          std::to_string(-1.0 / margin));
}

}  // namespace

StepStats step(SystemState& state, const SimConfig& cfg, const NonlocalOperator& op,
               const PotentialSpec& potential, const ScalarField& source) {
    const DomainGrid& grid = state.theta.grid;
    if (!(grid == op.grid())) throw NumericError("state and operator grids differ");
    const std::int64_t n = grid.total();
    const double dt = cfg.dt;

    // Stage 1: pointwise implicit solve for chi, nonlocal and coupling terms lagged.
    const ScalarField conv = op.apply(state.chi);
    ScalarField chi_next = make_field(grid, FieldTag::Chi);
    StepStats stats;
    int bad_node = -1;
    const char* bad_what = "";
#pragma omp parallel
    {
        int local_iters = 0;
        double local_res = 0.0;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const double rhs =
                state.chi.values[i] +
                dt * (conv.values[i] + cfg.alpha * state.theta.values[i]);
            const NodeSolve ns = solve_node(op.kappa().values[i], dt, rhs, potential,
                                            state.chi.values[i], cfg.newton_tol,
                                            cfg.newton_max_iters);
            if (!ns.ok) {
#pragma omp critical
                {
                    if (bad_node < 0 || i < bad_node) {
                        bad_node = static_cast<int>(i);
                        bad_what = ns.what;
                    }
                }
            } else {
                chi_next.values[i] = ns.root;
                local_iters = std::max(local_iters, ns.iters);
                local_res = std::max(local_res, ns.residual);
            }
        }
#pragma omp critical
        {
            stats.newton_iters_max = std::max(stats.newton_iters_max, local_iters);
            stats.newton_residual_max = std::max(stats.newton_residual_max, local_res);
        }
    }
    if (bad_node >= 0)
        throw NumericError(std::string(bad_what) + " at node " + std::to_string(bad_node) +
                           ", t = " + std::to_string(state.time + dt));

    // Stage 2: implicit heat solve with the fresh chi increment.
    ScalarField b = make_field(grid, FieldTag::Other);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        b.values[i] = state.theta.values[i] -
                      cfg.alpha * (chi_next.values[i] - state.chi.values[i]) +
                      dt * source.values[i];
    ScalarField theta_next = state.theta;  // warm start
    std::tie(stats.cg_iters, stats.cg_residual) =
        solve_heat(theta_next, b, dt, cfg.linear_tol, cfg.linear_max_iters);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        state.chi_t.values[i] = (chi_next.values[i] - state.chi.values[i]) / dt;
    state.chi = std::move(chi_next);
    state.theta = std::move(theta_next);
    state.time += dt;
    return stats;
}

SystemState make_initial_state(const SimConfig& cfg, const DomainGrid& grid) {
    SystemState s = make_state(grid);
    std::mt19937_64 rng(cfg.seed);

    auto fill_profile = [&](ScalarField& f, const std::string& profile, double value,
                            double amplitude, int mode, const std::string& path) {
        if (profile == "zero") return;
        if (profile == "constant") {
            std::fill(f.values.begin(), f.values.end(), value);
            return;
        }
        if (profile == "sine") {
            for (std::int64_t i = 0; i < grid.total(); ++i) {
                const auto x = grid.coordinate(i);
                double v = amplitude * std::sin(mode * std::numbers::pi * x[0] / grid.length[0]);
                if (grid.dim == 2)
                    v *= std::sin(mode * std::numbers::pi * x[1] / grid.length[1]);
                f.values[i] = value + v;
            }
            return;
        }
        if (profile == "random") {
            std::uniform_real_distribution<double> dist(-amplitude, amplitude);
            for (auto& v : f.values) v = value + dist(rng);
            return;
        }
        // "file"
        if (path.empty()) throw ConfigError("ic profile 'file' requires a path");
        const FieldBlock blk = read_field_file(path);
        if (!(blk.field.grid == grid))
            throw IoError("initial-data file '" + path + "' grid does not match the config grid");
        f.values = blk.field.values;
    };

    fill_profile(s.theta, cfg.theta_profile, cfg.theta_value, cfg.theta_amplitude, cfg.theta_mode,
                 cfg.theta_path);
    fill_profile(s.chi, cfg.chi_profile, cfg.chi_value, cfg.chi_amplitude, cfg.chi_mode,
                 cfg.chi_path);

    const double bound = 1.0 - cfg.delta0;
    for (std::size_t i = 0; i < s.chi.values.size(); ++i) {
        if (!(std::fabs(s.chi.values[i]) <= bound))
            throw ConfigError("initial chi violates the margin delta0 = " +
                              std::to_string(cfg.delta0) + " at node " + std::to_string(i));
    }
    validate_state(s);
    return s;
}

ScalarField make_source_field(const SimConfig& cfg, const DomainGrid& grid) {
    if (!cfg.source_path.empty()) {
        const FieldBlock blk = read_field_file(cfg.source_path);
        if (!(blk.field.grid == grid))
            throw IoError("source field file grid does not match the config grid");
        ScalarField f = blk.field;
        f.tag = FieldTag::Source;
        return f;
    }
    return make_field(grid, FieldTag::Source, cfg.source);
}

namespace {

std::int64_t step_count_for(const SimConfig& cfg) {
    const double ratio = cfg.t_final / cfg.dt;
    const std::int64_t n = static_cast<std::int64_t>(std::llround(ratio));
    if (std::fabs(n * cfg.dt - cfg.t_final) > 1e-9 * std::max(cfg.t_final, cfg.dt))
        throw ConfigError("sim.t_final must be an integer multiple of sim.dt");
    return n;
}

}  // namespace

RunResult run(const SimConfig& cfg, const NonlocalOperator& op, const PotentialSpec& potential,
              const RecordObserver& observer) {
    const DomainGrid grid = op.grid();
    check_stability_gate(cfg, op, potential);
    const std::int64_t n_steps = step_count_for(cfg);
    const ScalarField source = make_source_field(cfg, grid);

    RunResult result;
    result.final_state = make_initial_state(cfg, grid);
    SystemState& state = result.final_state;

    auto emit = [&](int newton_iters) {
        DiagnosticsRecord rec =
            make_record(state, op, potential, cfg.xi, cfg.eta, cfg.sigma, newton_iters);
        result.records.push_back(rec);
        if (observer) observer(rec, state);
    };

    result.min_delta = 1.0 - max_abs(state.chi);
    emit(0);
    try {
        for (std::int64_t i = 0; i < n_steps; ++i) {
            const StepStats st = step(state, cfg, op, potential, source);
            result.newton_residual_max = std::max(result.newton_residual_max, st.newton_residual_max);
            result.min_delta = std::min(result.min_delta, 1.0 - max_abs(state.chi));
            result.steps_taken = static_cast<int>(i) + 1;
            if ((i + 1) % cfg.cadence == 0 || i + 1 == n_steps) emit(st.newton_iters_max);
        }
        result.completed = true;
    } catch (const NumericError& err) {
        result.completed = false;
        result.failure = err.what();
        result.failure_time = state.time;
    }
    return result;
}

RunResult run(const SimConfig& cfg, const RecordObserver& observer) {
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec potential = cfg.make_potential();
    return run(cfg, op, potential, observer);
}

double DependenceResult::lambda_l2_at(double horizon) const {
    double sup = 0.0;
    for (const auto& row : rows)
        if (row.t <= horizon * (1.0 + 1e-12)) sup = std::max(sup, row.lhs_l2);
    return ic_distance_l2 > 0.0 ? sup / ic_distance_l2 : 0.0;
}

DependenceResult continuous_dependence_experiment(const SimConfig& cfg, const SystemState& ic1,
                                                  const SystemState& ic2) {
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec potential = cfg.make_potential();
    check_stability_gate(cfg, op, potential);
    const DomainGrid grid = op.grid();
    const ScalarField source = make_source_field(cfg, grid);
    const std::int64_t n_steps = step_count_for(cfg);

    SystemState a = ic1;
    SystemState b = ic2;
    validate_state(a);
    validate_state(b);

    DependenceResult out;
    auto diff_field = [&](const ScalarField& u, const ScalarField& v) {
        ScalarField d = make_field(grid, FieldTag::Other);
        for (std::int64_t i = 0; i < grid.total(); ++i) d.values[i] = u.values[i] - v.values[i];
        return d;
    };

    double grad_int = 0.0;  // ∫₀ᵗ ‖∇θd‖² dτ, trapezoid on the cadence grid
    double lap_int = 0.0;   // ∫₀ᵗ ‖Aθd‖² dτ
    double prev_grad_sq = 0.0, prev_lap_sq = 0.0, prev_t = 0.0;
    bool first = true;

    auto sample = [&]() {
        const ScalarField dtheta = diff_field(a.theta, b.theta);
        const ScalarField dchi = diff_field(a.chi, b.chi);
        const ScalarField a_dtheta = apply_neg_laplacian(dtheta);
        DependenceRow row;
        row.t = a.time;
        row.l2_dtheta = norm_l2(dtheta);
        row.v_dtheta = norm_v(dtheta);
        row.l2_dchi = norm_l2(dchi);
        const double lap_sq = grid.cell_weight() * par::det_dot(a_dtheta.values, a_dtheta.values);
        const double grad_sq = row.v_dtheta * row.v_dtheta;
        if (!first) {
            grad_int += 0.5 * (row.t - prev_t) * (grad_sq + prev_grad_sq);
            lap_int += 0.5 * (row.t - prev_t) * (lap_sq + prev_lap_sq);
        }
        first = false;
        prev_t = row.t;
        prev_grad_sq = grad_sq;
        prev_lap_sq = lap_sq;
        row.lhs_l2 = row.l2_dtheta + std::sqrt(grad_int) + row.l2_dchi;
        row.lhs_v = row.v_dtheta + std::sqrt(lap_int);
        out.rows.push_back(row);
    };

    sample();
    out.ic_distance_l2 = out.rows[0].l2_dtheta + out.rows[0].l2_dchi;
    out.ic_distance_v = out.rows[0].v_dtheta + out.rows[0].l2_dchi;
    for (std::int64_t i = 0; i < n_steps; ++i) {
        step(a, cfg, op, potential, source);
        step(b, cfg, op, potential, source);
        if ((i + 1) % cfg.cadence == 0 || i + 1 == n_steps) sample();
    }
    for (const auto& row : out.rows) {
        if (out.ic_distance_l2 > 0.0)
            out.lambda_l2 = std::max(out.lambda_l2, row.lhs_l2 / out.ic_distance_l2);
        if (out.ic_distance_v > 0.0)
            out.lambda_v = std::max(out.lambda_v, row.lhs_v / out.ic_distance_v);
    }
    return out;
}

}  // namespace nlpf
