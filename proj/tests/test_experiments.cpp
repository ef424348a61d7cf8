#include <doctest.h>

#include <cmath>
#include <random>

#include "nlpf/errors.hpp"
#include "nlpf/experiments.hpp"

using namespace nlpf;

namespace {

SimConfig attractor_cfg(int n, double dt, double t_final) {
    SimConfig c;
    c.dim = 1;
    c.lengths = {1.0, 1.0};
    c.node_counts = {n, 1};
    c.kernel.family = KernelFamily::Gaussian;
    c.kernel.amplitude = 2.0;
    c.kernel.width = 0.2;  // kappa_min ~ 0.5 on (0,1): lambda0 > 0 with hardlog
    c.strategy = ConvStrategy::Fast;
    c.potential_family = PotentialFamily::HardLog;
    c.c1 = 1.0;
    c.lambda_w = 0.0;
    c.alpha = 0.5;
    c.dt = dt;
    c.t_final = t_final;
    c.cadence = 4;
    c.xi = 0.1;
    return c;
}

SystemState random_ic(const DomainGrid& g, std::uint64_t seed, double theta_amp, double chi_amp) {
    SystemState s = make_state(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : s.theta.values) v = theta_amp * dist(rng);
    for (auto& v : s.chi.values) v = chi_amp * dist(rng);
    return s;
}

}  // namespace

TEST_CASE("steady state: zero kernel fixed point is the origin") {
    SimConfig cfg = attractor_cfg(16, 0.01, 0.0);
    cfg.kernel.amplitude = 0.0;
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();  // convex: margin = inf W'' = 2 > 0
    const DomainGrid g = op.grid();
    const SystemState guess = random_ic(g, 5, 0.0, 0.5);
    const SteadyResult res = steady_state(op, pot, 0.5, 0.0, guess.chi);
    for (double v : res.chi.values) CHECK(std::fabs(v) <= 1e-12);
    CHECK(res.residual <= 1e-10);
}

TEST_CASE("steady state: converged outputs meet the residual contract") {
    SimConfig cfg = attractor_cfg(24, 0.01, 0.0);
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();
    const SystemState guess = random_ic(op.grid(), 7, 0.0, 0.4);
    const SteadyResult res = steady_state(op, pot, 0.5, 0.0, guess.chi);
    CHECK(res.residual <= 1e-10);
    CHECK(res.iterations > 0);
}

TEST_CASE("steady state rejections") {
    SimConfig cfg = attractor_cfg(12, 0.01, 0.0);
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();
    const SystemState guess = random_ic(op.grid(), 9, 0.0, 0.3);
    CHECK_THROWS_WITH_AS(steady_state(op, pot, 0.5, 1.0, guess.chi),
                         doctest::Contains("f = 0"), ConfigError);
    // concave potential with no kernel mass: margin <= 0
    SimConfig flat = cfg;
    flat.kernel.amplitude = 0.0;
    const NonlocalOperator op0 = flat.make_operator();
    const PotentialSpec bad = PotentialSpec::hard_log(0.0, 0.5);
    CHECK_THROWS_WITH_AS(steady_state(op0, bad, 0.5, 0.0, guess.chi),
                         doctest::Contains("contraction not guaranteed"), NumericError);
}

TEST_CASE("long run terminal state agrees with the independent fixed-point solve") {
    SimConfig cfg = attractor_cfg(24, 0.01, 20.0);
    cfg.theta_profile = "sine";
    cfg.theta_amplitude = 0.5;
    cfg.chi_profile = "sine";
    cfg.chi_amplitude = 0.4;
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();
    REQUIRE(lambda0(op, pot) > 0.0);

    const RunResult res = run(cfg, op, pot);
    REQUIRE(res.completed);
    CHECK(norm_l2(res.final_state.theta) <= 1e-4);

    const SteadyResult steady = steady_state(op, pot, cfg.alpha, 0.0, res.final_state.chi);
    ScalarField diff = steady.chi;
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] -= res.final_state.chi.values[i];
    CHECK(norm_l2(diff) <= 1e-3);
}

TEST_CASE("pair contraction: identical initial data gives the zero series") {
    SimConfig cfg = attractor_cfg(16, 0.01, 0.2);
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();
    const double lam0 = lambda0(op, pot);
    REQUIRE(lam0 > 0.0);
    const Spectrum sp = eigendecompose(op);
    const Projector proj = Projector::build(op, sp, lam0, 1.0);

    const SystemState ic = random_ic(op.grid(), 21, 0.5, 0.4);
    const ContractionResult res = pair_contraction_experiment(cfg, ic, ic, proj);
    for (const auto& s : res.series) {
        CHECK(s.d_value == 0.0);
        CHECK(s.k_value == 0.0);
    }
    CHECK(res.d_t == 0.0);
}

TEST_CASE("pair contraction: envelope holds with positive mu3, full rank included") {
    SimConfig cfg = attractor_cfg(16, 0.01, 2.0);
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();
    const double lam0 = lambda0(op, pot);
    REQUIRE(lam0 > 0.0);
    const Spectrum sp = eigendecompose(op);

    const SystemState ic1 = random_ic(op.grid(), 31, 0.5, 0.5);
    const SystemState ic2 = random_ic(op.grid(), 32, 0.5, 0.5);

    SUBCASE("thresholded projector") {
        const Projector proj = Projector::build(op, sp, lam0, 1.0);
        const ContractionResult res = pair_contraction_experiment(cfg, ic1, ic2, proj);
        CHECK(res.mu3 > 0.0);
        CHECK(res.min_slack >= -1e-8 * res.scale);
        CHECK(res.d_t > 0.0);
        CHECK(res.mu2 > 0.0);
    }

    SUBCASE("full-rank projector sanity path") {
        // narrow kernel: slow spectral decay keeps every mode above threshold
        SimConfig narrow = cfg;
        narrow.kernel.width = 0.03;
        const NonlocalOperator op2 = narrow.make_operator();
        REQUIRE(lambda0(op2, pot) > 0.0);
        const Spectrum sp2 = eigendecompose(op2);
        const Projector proj = Projector::build(op2, sp2, 1e-12, 1.0);
        CHECK(proj.rank() == op2.grid().total());
        const ContractionResult res = pair_contraction_experiment(narrow, ic1, ic2, proj);
        CHECK(res.mu3 > 0.0);
        CHECK(res.min_slack >= -1e-8 * res.scale);
        CHECK(res.d_t > 0.0);
    }
}

TEST_CASE("precompactness probe: identical ensemble collapses, axioms hold") {
    SimConfig cfg = attractor_cfg(16, 0.01, 0.5);
    const NonlocalOperator op = cfg.make_operator();
    const PotentialSpec pot = cfg.make_potential();
    const double lam0 = lambda0(op, pot);
    REQUIRE(lam0 > 0.0);
    const Projector proj = Projector::build(op, eigendecompose(op), lam0, 1.0);

    SUBCASE("identical members have pairwise zero distance") {
        const SystemState ic = random_ic(op.grid(), 77, 0.3, 0.4);
        std::vector<SystemState> ensemble(8, ic);
        const PrecompactnessReport rep = precompactness_probe(cfg, ensemble, proj, 0.5);
        for (const auto& row : rep.d_matrix)
            for (double d : row) CHECK(d == 0.0);
        CHECK(rep.bounds_finite);
    }

    SUBCASE("random ensemble: symmetry, triangle inequality, d_T recomputation") {
        std::vector<SystemState> ensemble;
        for (int k = 0; k < 8; ++k) ensemble.push_back(random_ic(op.grid(), 100 + k, 0.4, 0.4));
        const PrecompactnessReport rep = precompactness_probe(cfg, ensemble, proj, 0.5);
        CHECK(rep.max_symmetry_error == 0.0);
        CHECK(rep.max_triangle_violation <= 1e-12);
        CHECK(rep.bounds_finite);
        CHECK(rep.theta_da_bound > 0.0);

        // independent recomputation of one entry through the pair experiment
        SimConfig pair_cfg = cfg;
        pair_cfg.t_final = 0.5;
        const ContractionResult pair =
            pair_contraction_experiment(pair_cfg, ensemble[0], ensemble[1], proj);
        CHECK(rep.d_matrix[0][1] == doctest::Approx(pair.d_t).epsilon(1e-10));
    }

    SUBCASE("undersized ensembles are rejected") {
        std::vector<SystemState> ensemble(3, random_ic(op.grid(), 5, 0.3, 0.3));
        CHECK_THROWS_AS(precompactness_probe(cfg, ensemble, proj, 0.5), ConfigError);
    }
}
