#include <doctest.h>

#include <cmath>

#include "nlpf/errors.hpp"
#include "nlpf/potential.hpp"

using namespace nlpf;

TEST_CASE("doublelog values and symmetry at the origin") {
    const PotentialSpec p = PotentialSpec::double_log(1.0);
    CHECK(p.w(0.0) == 0.0);
    CHECK(p.dw(0.0) == 0.0);
    const double expected = 1.5 * std::log(1.5) + 0.5 * std::log(0.5) - 0.125;
    CHECK(p.w(0.5) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("hardlog blows up monotonically toward the pure states") {
    const PotentialSpec p = PotentialSpec::hard_log(1.0, 0.0);
    CHECK(p.w(0.999) > p.w(0.99));
    double prev = p.w(1.0 - 1e-2);
    for (int k = 3; k <= 8; ++k) {
        const double cur = p.w(1.0 - std::pow(10.0, -k));
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("evenness of both families") {
    for (const PotentialSpec& p :
         {PotentialSpec::hard_log(1.3, 0.7), PotentialSpec::double_log(2.0)}) {
        for (double r : {0.1, 0.35, 0.77, 0.95}) {
            CHECK(std::fabs(p.w(r) - p.w(-r)) <= 1e-13 * std::max(1.0, std::fabs(p.w(r))));
            CHECK(std::fabs(p.dw(r) + p.dw(-r)) <= 1e-13 * std::max(1.0, std::fabs(p.dw(r))));
        }
    }
}

TEST_CASE("derivative consistency: observed order >= 1.9") {
    for (const PotentialSpec& p :
         {PotentialSpec::hard_log(1.0, 0.5), PotentialSpec::double_log(1.0)}) {
        for (double r = -0.9; r <= 0.9 + 1e-12; r += 0.15) {
            double err[2];
            const double hs[2] = {1e-3, 1e-4};
            for (int k = 0; k < 2; ++k) {
                const double h = hs[k];
                const double fd = (p.w(r + h) - p.w(r - h)) / (2.0 * h);
                err[k] = std::fabs(fd - p.dw(r));
            }
            if (err[1] > 1e-13) {  // below that the quotient is rounding noise
                const double order = std::log10(err[0] / err[1]);
                CHECK(order >= 1.9);
            }
        }
    }
}

TEST_CASE("domain errors outside (-1,1)") {
    const PotentialSpec p = PotentialSpec::hard_log(1.0, 0.0);
    CHECK_THROWS_WITH_AS((void)p.w(1.0), doctest::Contains("pure state"), NumericError);
    CHECK_THROWS_AS((void)p.dw(-1.0), NumericError);
    CHECK_THROWS_AS((void)p.d2w(1.5), NumericError);
}

TEST_CASE("hardlog offset keeps min W = 0 for the double-well case") {
    const PotentialSpec p = PotentialSpec::hard_log(0.5, 4.0);  // lambda_w > 2 c1
    const double rstar = std::sqrt(1.0 - 2.0 * 0.5 / 4.0);
    CHECK(p.w(rstar) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(p.w(0.0) > 0.0);
    // sampled positivity
    for (int k = 0; k <= 2000; ++k) {
        const double r = -0.9995 + 1.999 * k / 2000.0;
        CHECK(p.w(r) >= -1e-12);
    }
}

TEST_CASE("check_W2: computed lambda passes, tampered lambda fails with witness") {
    const PotentialSpec convex = PotentialSpec::hard_log(1.0, 0.0);
    CHECK(convex.lambda() == 0.0);  // sup(-W'') = -2 < 0
    const auto rep = check_semiconvexity(convex, 5001);
    CHECK(rep.passed);

    const PotentialSpec dl = PotentialSpec::double_log(4.0);
    CHECK(dl.lambda() == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(check_semiconvexity(dl, 10001).passed);

    const PotentialSpec bad = dl.with_lambda(1.0);  // below sup(-W'') = 2
    const auto bad_rep = check_semiconvexity(bad, 10001);
    CHECK(!bad_rep.passed);
    CHECK(std::fabs(bad_rep.witness_r) < 0.1);  // violation concentrates near 0
}

TEST_CASE("check_W25 holds densely for both families") {
    const auto hard = check_w25(PotentialSpec::hard_log(1.0, 0.0), 10000);
    CHECK(hard.passed);
    CHECK(hard.min_slack >= -1e-10);
    const auto dl = check_w25(PotentialSpec::double_log(1.0), 10000);
    CHECK(dl.passed);
    // spot value: r = 0.9 has strictly positive slack for the hard barrier
    const PotentialSpec p = PotentialSpec::hard_log(1.0, 0.0);
    const double r = 0.9;
    CHECK(p.dw(r) * r - p.w(r) + 0.5 * p.lambda() * r * r + p.w0() > 0.0);
}

TEST_CASE("separation radius: bisection inverse, degenerate and error paths") {
    const PotentialSpec p = PotentialSpec::hard_log(1.0, 0.0);

    const double w_max = -std::log(1.0 - 0.81);  // = W(0.9)
    const double delta = separation_radius(p, w_max);
    CHECK(delta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::fabs(p.w(1.0 - delta) - w_max) <= 1e-10);

    // W_max = W(0) = 0: only the minimum qualifies
    CHECK(separation_radius(p, 0.0) >= 1.0 - 1e-12);

    CHECK_THROWS_WITH_AS(separation_radius(p, std::numeric_limits<double>::infinity()),
                         doctest::Contains("no separation"), NumericError);
    CHECK_THROWS_WITH_AS(separation_radius(PotentialSpec::double_log(1.0), 1.0),
                         doctest::Contains("bounded"), NumericError);
}
