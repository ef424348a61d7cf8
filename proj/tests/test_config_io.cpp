#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nlpf/config.hpp"
#include "nlpf/errors.hpp"
#include "nlpf/snapshot.hpp"
#include "nlpf/state.hpp"

using namespace nlpf;

namespace {

const char* kMinimal =
    "grid.dim = 1\n"
    "grid.length1 = 1.0\n"
    "grid.n1 = 16\n"
    "sim.dt = 0.01\n"
    "sim.t_final = 0.1\n";

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
    const SimConfig cfg = parse_config_text(kMinimal, "minimal");
    CHECK(cfg.dim == 1);
    CHECK(cfg.node_counts[0] == 16);
    CHECK(cfg.kernel.family == KernelFamily::Gaussian);
    CHECK(cfg.strategy == ConvStrategy::Fast);
    CHECK(cfg.cadence == 1);
    CHECK(cfg.newton_tol == 1e-12);
    CHECK(cfg.newton_max_iters == 50);
    CHECK(cfg.linear_tol == 1e-10);
    CHECK(cfg.c_lambda0 == 1.0);
    CHECK(cfg.xi == doctest::Approx(std::min(0.25, 1.0 / 8.0)));  // alpha = 1 default
}

TEST_CASE("constraint violations name the key and line") {
    CHECK_THROWS_WITH_AS(
        parse_config_text("grid.dim = 1\ngrid.length1 = 1\ngrid.n1 = 16\n"
                          "sim.dt = -0.1\nsim.t_final = 1\n",
                          "bad"),
        doctest::Contains("sim.dt must be > 0"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("grid.dim = 3\ngrid.length1 = 1\ngrid.n1 = 16\n"
                                           "sim.dt = 0.1\nsim.t_final = 1\n",
                                           "bad"),
                         doctest::Contains("grid.dim"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(std::string(kMinimal) + "sim.bogus = 1\n", "bad"),
                         doctest::Contains("unknown key 'sim.bogus'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(std::string(kMinimal) + "sim.bogus = 1\n", "bad"),
                         doctest::Contains(":6:"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("grid.dim = 1\n", "bad"),
                         doctest::Contains("missing required key"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(std::string(kMinimal) + "sim.dt = 0.2\n", "bad"),
        doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(std::string(kMinimal) + "ic.delta0 = 1.5\n", "bad"),
        doctest::Contains("ic.delta0"), ConfigError);
}

TEST_CASE("canonical emission round-trips to an identical SimConfig") {
    std::string text = std::string(kMinimal) +
                       "kernel.family = mollifier\n"
                       "kernel.radius = 0.22\n"
                       "sim.alpha = 0.7\n"
                       "ic.chi_profile = sine\n"
                       "ic.chi_amplitude = 0.4\n"
                       "ic.seed = 99\n";
    const SimConfig cfg = parse_config_text(text, "round");
    const std::string canon = canonical_config(cfg);
    const SimConfig reparsed = parse_config_text(canon, "canon");
    CHECK(cfg == reparsed);
    CHECK(canonical_config(reparsed) == canon);
    CHECK(config_hash(cfg) == config_hash(reparsed));

    // comments and spacing do not affect the hash
    const SimConfig spaced = parse_config_text("# header\n" + text + "\n  # trailing\n", "spaced");
    CHECK(config_hash(spaced) == config_hash(cfg));
}

TEST_CASE("snapshot round-trip is lossless") {
    const double l[] = {1.0, 2.0};
    const int c[] = {5, 4};
    const DomainGrid g = build_grid(2, l, c);
    SystemState s = make_state(g);
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : s.theta.values) v = 10.0 * dist(rng);
    for (auto& v : s.chi.values) v = 0.97 * dist(rng);
    s.time = 0.734562345234;

    const auto path = std::filesystem::temp_directory_path() / "nlpf_state_roundtrip.txt";
    write_state(path, s);
    const SystemState back = read_state(path, g);
    CHECK(back.time == s.time);
    for (std::size_t i = 0; i < s.theta.values.size(); ++i) {
        CHECK(back.theta.values[i] == s.theta.values[i]);
        CHECK(back.chi.values[i] == s.chi.values[i]);
    }
}

TEST_CASE("snapshot rejection paths") {
    const double l[] = {1.0};
    const int c[] = {4};
    const DomainGrid g = build_grid(1, l, c);
    const auto dir = std::filesystem::temp_directory_path();

    SUBCASE("chi beyond the open interval is rejected with the node index") {
        const auto path = dir / "nlpf_bad_chi.txt";
        std::ofstream out(path);
        out << "# grid 1 4 1 chi 0\n0.1\n0.2\n1\n0.3\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_field_file(path), doctest::Contains("node 2"), NumericError);
    }

    SUBCASE("grid header mismatch is rejected") {
        const auto path = dir / "nlpf_wrong_grid.txt";
        SystemState s = make_state(g);
        write_state(path, s);
        const double l2[] = {1.0};
        const int c2[] = {5};
        const DomainGrid other = build_grid(1, l2, c2);
        CHECK_THROWS_WITH_AS(read_state(path, other), doctest::Contains("grid"), IoError);
    }

    SUBCASE("malformed values carry line numbers") {
        const auto path = dir / "nlpf_malformed.txt";
        std::ofstream out(path);
        out << "# grid 1 4 1 theta 0\n0.1\nnot_a_number\n0.3\n0.4\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_field_file(path), doctest::Contains(":3:"), IoError);
    }

    SUBCASE("truncated files are rejected") {
        const auto path = dir / "nlpf_truncated.txt";
        std::ofstream out(path);
        out << "# grid 1 4 1 theta 0\n0.1\n0.2\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_field_file(path), doctest::Contains("end of file"), IoError);
    }
}
