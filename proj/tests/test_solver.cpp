#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlpf/errors.hpp"
#include "nlpf/solver.hpp"

using namespace nlpf;

namespace {

SimConfig base_cfg(int n, double dt, double t_final) {
    SimConfig c;
    c.dim = 1;
    c.lengths = {1.0, 1.0};
    c.node_counts = {n, 1};
    c.kernel.family = KernelFamily::Gaussian;
    c.kernel.amplitude = 1.0;
    c.kernel.width = 0.1;
    c.strategy = ConvStrategy::Fast;
    c.potential_family = PotentialFamily::HardLog;
    c.c1 = 1.0;
    c.lambda_w = 0.0;
    c.alpha = 0.5;
    c.dt = dt;
    c.t_final = t_final;
    c.cadence = 1;
    c.xi = 0.1;
    return c;
}

// classical RK4 with many substeps, oracle for the scalar ODE chi' = -W'(chi)
double ode_oracle(const PotentialSpec& pot, double chi0, double t_end, int substeps) {
    double c = chi0;
    const double h = t_end / substeps;
    auto f = [&](double r) { return -pot.dw(r); };
    for (int i = 0; i < substeps; ++i) {
        const double k1 = f(c);
        const double k2 = f(c + 0.5 * h * k1);
        const double k3 = f(c + 0.5 * h * k2);
        const double k4 = f(c + h * k3);
        c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return c;
}

}  // namespace

TEST_CASE("decoupled limit: pure heat decay, chi frozen") {
    SimConfig cfg = base_cfg(31, 0.001, 0.05);
    cfg.alpha = 0.0;
    cfg.kernel.amplitude = 0.0;  // zero kernel
    cfg.c1 = 0.0;                // W' == 0 stub
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 1.0;
    cfg.chi_profile = "constant";
    cfg.chi_value = 0.3;

    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    for (double v : res.final_state.chi.values) CHECK(v == doctest::Approx(0.3).epsilon(1e-14));

    // implicit Euler on the lowest stencil mode: factor (1 + dt*mu)^{-steps}
    const DomainGrid g = cfg.make_grid();
    const double h = g.spacing[0];
    const double mu = (2.0 - 2.0 * std::cos(std::numbers::pi * h)) / (h * h);
    const double factor = std::pow(1.0 + cfg.dt * mu, -50.0);
    for (std::int64_t i = 0; i < g.total(); ++i) {
        const double expected =
            factor * std::sin(std::numbers::pi * g.coordinate(i)[0]);
        CHECK(res.final_state.theta.values[i] == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("pointwise dynamics match a high-accuracy ODE oracle at first order") {
    SimConfig cfg = base_cfg(5, 0.01, 0.5);
    cfg.alpha = 0.0;
    cfg.kernel.amplitude = 0.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.6;
    cfg.chi_mode = 1;

    const PotentialSpec pot = cfg.make_potential();
    const DomainGrid g = cfg.make_grid();
    const SystemState ic = make_initial_state(cfg, g);

    double err_coarse = 0.0, err_fine = 0.0;
    for (int half = 0; half < 2; ++half) {
        SimConfig c2 = cfg;
        c2.dt = half == 0 ? 0.01 : 0.005;
        const RunResult res = run(c2);
        REQUIRE(res.completed);
        double err = 0.0;
        for (std::int64_t i = 0; i < g.total(); ++i) {
            const double exact = ode_oracle(pot, ic.chi.values[i], cfg.t_final, 20000);
            err = std::max(err, std::fabs(res.final_state.chi.values[i] - exact));
        }
        (half == 0 ? err_coarse : err_fine) = err;
    }
    CHECK(err_coarse > 0.0);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);  // global first order
}

TEST_CASE("pointwise Newton residual obeys the solver contract everywhere") {
    SimConfig cfg = base_cfg(32, 0.01, 0.5);
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 2.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.5;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    CHECK(res.newton_residual_max <= cfg.newton_tol);
    CHECK(res.min_delta > 0.0);
}

TEST_CASE("run with t_final = 0 emits exactly the initial record") {
    SimConfig cfg = base_cfg(16, 0.01, 0.0);
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    CHECK(res.records.size() == 1);
    CHECK(res.records[0].t == 0.0);
    CHECK(res.steps_taken == 0);
}

TEST_CASE("t_final must be a multiple of dt") {
    SimConfig cfg = base_cfg(16, 0.01, 0.015);
    CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("integer multiple"), ConfigError);
}

TEST_CASE("observed temporal order via a Richardson triple") {
    SimConfig base = base_cfg(24, 0.02, 1.0);
    base.theta_profile = "sine";
    base.theta_amplitude = 1.0;
    base.chi_profile = "sine";
    base.chi_amplitude = 0.4;
    base.alpha = 1.0;

    ScalarField theta[3], chi[3];
    for (int k = 0; k < 3; ++k) {
        SimConfig cfg = base;
        cfg.dt = 0.02 / (1 << k);
        const RunResult res = run(cfg);
        REQUIRE(res.completed);
        theta[k] = res.final_state.theta;
        chi[k] = res.final_state.chi;
    }
    auto diff_norm = [](const ScalarField& a, const ScalarField& b) {
        ScalarField d = a;
        for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
        return norm_l2(d);
    };
    const double e1 = std::hypot(diff_norm(theta[0], theta[1]), diff_norm(chi[0], chi[1]));
    const double e2 = std::hypot(diff_norm(theta[1], theta[2]), diff_norm(chi[1], chi[2]));
    const double order = std::log2(e1 / e2);
    CHECK(order >= 0.8);
    CHECK(order <= 1.2);
}

TEST_CASE("even initial data stays even") {
    SimConfig cfg = base_cfg(33, 0.005, 1.0);
    cfg.theta_profile = "sine";  // sin(pi x) is even about the domain center
    cfg.theta_amplitude = 1.5;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.5;
    cfg.source = 0.0;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    const std::int64_t n = res.final_state.theta.grid.total();
    for (std::int64_t i = 0; i < n; ++i) {
        CHECK(std::fabs(res.final_state.theta.values[i] - res.final_state.theta.values[n - 1 - i]) <=
              1e-10);
        CHECK(std::fabs(res.final_state.chi.values[i] - res.final_state.chi.values[n - 1 - i]) <=
              1e-10);
    }
}

TEST_CASE("identical configs give bit-identical diagnostics") {
    SimConfig cfg = base_cfg(24, 0.01, 0.3);
    cfg.theta_profile = "random";
    cfg.theta_amplitude = 1.0;
    cfg.chi_profile = "random";
    cfg.chi_amplitude = 0.4;
    cfg.seed = 777;

    const RunResult a = run(cfg);
    const RunResult b = run(cfg);
    REQUIRE(a.completed);
    REQUIRE(b.completed);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(csv_line(a.records[i]) == csv_line(b.records[i]));
}

TEST_CASE("guard-band violation terminates with a structured report") {
    SimConfig cfg = base_cfg(8, 0.1, 1.0);
    cfg.c1 = 0.0;  // no barrier: the linear pointwise map can leave the band
    cfg.alpha = 5.0;
    cfg.theta_profile = "constant";
    cfg.theta_value = 10.0;
    const RunResult res = run(cfg);
    CHECK(!res.completed);
    CHECK(res.failure.find("guard band") != std::string::npos);
    CHECK(res.records.size() >= 1);
}

TEST_CASE("stability gate rejects too-large dt when the margin is negative") {
    SimConfig cfg = base_cfg(8, 3.0, 3.0);
    cfg.kernel.amplitude = 0.0;
    cfg.c1 = 0.0;
    cfg.lambda_w = 0.5;  // inf W'' = -0.5, gate needs dt < 2
    CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("stability gate"), ConfigError);
}

TEST_CASE("doublelog potential runs through the same solver path") {
    SimConfig cfg = base_cfg(24, 0.01, 1.0);
    cfg.potential_family = PotentialFamily::DoubleLog;
    cfg.doublelog_lambda = 1.0;
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 1.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.6;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    CHECK(res.newton_residual_max <= cfg.newton_tol);
    CHECK(res.min_delta > 0.0);
    CHECK(res.records.back().lyapunov < res.records.front().lyapunov);
    // the bounded family cannot produce a W-based separation radius
    CHECK_THROWS_AS(separation_radius(cfg.make_potential(), 1.0), NumericError);
}

TEST_CASE("2d runs complete with the same solver contracts") {
    SimConfig cfg = base_cfg(0, 0.01, 0.2);
    cfg.dim = 2;
    cfg.lengths = {1.0, 1.0};
    cfg.node_counts = {10, 10};
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 1.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.4;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    CHECK(res.newton_residual_max <= cfg.newton_tol);
    CHECK(res.min_delta > 0.0);
    // f = 0: the Lyapunov value decays along the run
    CHECK(res.records.back().lyapunov < res.records.front().lyapunov);
}

TEST_CASE("per-step Lyapunov monotonicity with the frozen regression bound") {
    // frozen for this exact config: with a convex barrier, a PSD kernel and
    // alpha = 1 the splitting is monotone to rounding (measured 0 violations)
    SimConfig cfg = base_cfg(32, 0.01, 1.0);
    cfg.alpha = 1.0;
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 2.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.5;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    double scale = 1.0;
    for (const auto& r : res.records) scale = std::max(scale, std::fabs(r.lyapunov));
    const double frozen_c = 1e-11;  // regression bound on (L_{n+1} - L_n)/dt^2, scaled
    for (std::size_t i = 1; i < res.records.size(); ++i)
        CHECK(res.records[i].lyapunov - res.records[i - 1].lyapunov <=
              frozen_c * cfg.dt * cfg.dt * scale);
}

TEST_CASE("separation margin is consistent with the separation radius of observed W") {
    SimConfig cfg = base_cfg(24, 0.01, 2.0);
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 1.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.6;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    const PotentialSpec pot = cfg.make_potential();
    double max_w = 0.0, delta_run = 1.0;
    for (const auto& r : res.records) {
        max_w = std::max(max_w, r.max_w);
        delta_run = std::min(delta_run, r.delta_margin);
    }
    CHECK(delta_run > 0.0);
    // sublevel {W <= max_w} confines |chi| to 1 - separation_radius
    const double delta_bound = separation_radius(pot, max_w);
    CHECK(delta_run >= delta_bound - 1e-9);
    // the bound is attained where max W and max |chi| coincide
    CHECK(delta_run == doctest::Approx(delta_bound).epsilon(1e-9));
}

TEST_CASE("continuous dependence: determinism, linear scaling, heat contraction") {
    SimConfig cfg = base_cfg(24, 0.01, 1.0);
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 1.0;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.4;
    const DomainGrid g = cfg.make_grid();
    const SystemState ic = make_initial_state(cfg, g);

    SUBCASE("identical initial data stays identical") {
        const DependenceResult dep = continuous_dependence_experiment(cfg, ic, ic);
        for (const auto& row : dep.rows) {
            CHECK(row.l2_dtheta <= 1e-13);
            CHECK(row.l2_dchi <= 1e-13);
        }
    }

    SUBCASE("difference norms scale linearly in the perturbation") {
        double final_diff[2];
        for (int k = 0; k < 2; ++k) {
            const double eps = k == 0 ? 1e-6 : 1e-7;
            SystemState ic2 = ic;
            for (std::size_t i = 0; i < ic2.chi.values.size(); ++i)
                ic2.chi.values[i] += eps * std::sin(2.0 * std::numbers::pi *
                                                    g.coordinate(static_cast<std::int64_t>(i))[0]);
            const DependenceResult dep = continuous_dependence_experiment(cfg, ic, ic2);
            final_diff[k] = dep.rows.back().l2_dchi;
        }
        const double ratio = final_diff[0] / final_diff[1];
        CHECK(ratio >= 5.0);
        CHECK(ratio <= 20.0);
    }

    SUBCASE("sup ratio grows at most exponentially across horizons 1, 2, 4") {
        SimConfig c4 = cfg;
        c4.t_final = 4.0;
        SystemState ic2 = ic;
        for (std::size_t i = 0; i < ic2.chi.values.size(); ++i) ic2.chi.values[i] += 1e-4;
        const DependenceResult dep = continuous_dependence_experiment(c4, ic, ic2);
        const double l1 = dep.lambda_l2_at(1.0);
        const double l2 = dep.lambda_l2_at(2.0);
        const double l4 = dep.lambda_l2_at(4.0);
        CHECK(l1 > 0.0);
        CHECK(l2 >= l1);  // sup over a larger window
        CHECK(l4 >= l2);
        CHECK(std::isfinite(l4));
        const double growth_rate = std::log(l4 / l1) / 3.0;  // reported exponential-fit rate
        CHECK(std::isfinite(growth_rate));
        CHECK(dep.lambda_l2 == doctest::Approx(l4));
    }

    SUBCASE("alpha = 0 theta difference contracts monotonically") {
        SimConfig c0 = cfg;
        c0.alpha = 0.0;
        SystemState ic2 = ic;
        for (std::size_t i = 0; i < ic2.theta.values.size(); ++i) ic2.theta.values[i] += 0.01;
        const DependenceResult dep = continuous_dependence_experiment(c0, ic, ic2);
        for (const auto& row : dep.rows)
            CHECK(row.l2_dtheta <= dep.rows.front().l2_dtheta * (1.0 + 1e-12));
        CHECK(dep.lambda_l2 < std::numeric_limits<double>::infinity());
    }
}
