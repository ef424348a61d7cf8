// Command-line front end: simulate / check / steady / spectrum / contract.
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "nlpf/config.hpp"
#include "nlpf/diagnostics.hpp"
#include "nlpf/errors.hpp"
#include "nlpf/experiments.hpp"
#include "nlpf/manifest.hpp"
#include "nlpf/snapshot.hpp"
#include "nlpf/solver.hpp"
#include "nlpf/spectral.hpp"

namespace fs = std::filesystem;
using namespace nlpf;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    long long seed = -1;
    bool quiet = false;
    std::string out_csv;
    std::string snapshots_dir;
    std::string ic2_path;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SimConfig load_config(const CliOptions& opt) {
    if (opt.config_path.empty()) throw ConfigError("--config is required");
    SimConfig cfg = parse_config(opt.config_path);
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    return cfg;
}

std::vector<std::string> echo_lines(const SimConfig& cfg) {
    std::vector<std::string> e;
    e.push_back("grid: dim=" + std::to_string(cfg.dim) + " n1=" + std::to_string(cfg.node_counts[0]) +
                (cfg.dim == 2 ? " n2=" + std::to_string(cfg.node_counts[1]) : "") +
                " L1=" + fmt(cfg.lengths[0]) + (cfg.dim == 2 ? " L2=" + fmt(cfg.lengths[1]) : ""));
    e.push_back("kernel: family=" + to_string(cfg.kernel.family) +
                " amplitude=" + fmt(cfg.kernel.amplitude) + " strategy=" + to_string(cfg.strategy));
    e.push_back("potential: family=" + to_string(cfg.potential_family) + " c1=" + fmt(cfg.c1) +
                " lambda_w=" + fmt(cfg.lambda_w) + " lambda=" + fmt(cfg.doublelog_lambda));
    return e;
}

struct ManifestScope {
    RunManifest manifest;
    fs::path dir;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    explicit ManifestScope(const SimConfig& cfg, const fs::path& out_dir) : dir(out_dir) {
        fs::create_directories(dir);
        manifest.config_hash = config_hash(cfg);
        manifest.echo = echo_lines(cfg);
    }
    void add(const fs::path& p) { manifest.artifacts.push_back(p.string()); }
    void finish(int status) {
        manifest.exit_status = status;
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const fs::path p = dir / "run_manifest.txt";
        write_manifest(p, manifest);
    }
};

int cmd_simulate(const CliOptions& opt) {
    const SimConfig cfg = load_config(opt);
    ManifestScope scope(cfg, opt.out_dir);

    const fs::path csv_path = opt.out_csv.empty() ? scope.dir / "diagnostics.csv" : fs::path(opt.out_csv);
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
    csv << kDiagnosticsCsvHeader << "\n";
    scope.add(csv_path);

    fs::path snap_dir;
    if (!opt.snapshots_dir.empty()) {
        snap_dir = opt.snapshots_dir;
        fs::create_directories(snap_dir);
    }
    int snapshot_index = 0;
    RecordObserver observer = [&](const DiagnosticsRecord& rec, const SystemState& state) {
        csv << csv_line(rec) << "\n";
        if (!snap_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof(name), "state_%06d.txt", snapshot_index++);
            const fs::path p = snap_dir / name;
            write_state(p, state);
            scope.add(p);
        }
    };

    const RunResult result = run(cfg, observer);
    csv.flush();
    if (!csv) throw IoError("write failed for '" + csv_path.string() + "'");

    if (!opt.quiet) {
        std::cout << "steps = " << result.steps_taken << "\n"
                  << "records = " << result.records.size() << "\n"
                  << "final_time = " << fmt(result.final_state.time) << "\n"
                  << "min_delta = " << fmt(result.min_delta) << "\n"
                  << "newton_residual_max = " << fmt(result.newton_residual_max) << "\n"
                  << "completed = " << (result.completed ? "yes" : "no") << "\n";
        if (cfg.radius > 0.0) {
            std::vector<double> t, v, w;
            for (const auto& r : result.records) {
                t.push_back(r.t);
                v.push_back(r.v_theta);
                w.push_back(r.max_w);
            }
            const auto entry = absorbing_entry(t, v, w, cfg.radius);
            std::cout << "absorbing_entry_t0 = " << (entry ? fmt(*entry) : "none") << "\n";
        }
    }
    if (!result.completed) {
        std::cerr << "numerical failure at t = " << fmt(result.failure_time) << ": "
                  << result.failure << "\n";
        scope.finish(kExitNumeric);
        return kExitNumeric;
    }
    scope.finish(kExitOk);
    return kExitOk;
}

int cmd_check(const CliOptions& opt) {
    const SimConfig cfg = load_config(opt);
    const DomainGrid grid = cfg.make_grid();
    const PotentialSpec potential = cfg.make_potential();
    const NonlocalOperator op = NonlocalOperator::build(grid, cfg.kernel, cfg.strategy);

    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        if (!ok) ++failures;
        if (!opt.quiet || !ok)
            std::cout << (ok ? "[ ok ] " : "[fail] ") << name << (detail.empty() ? "" : ": " + detail)
                      << "\n";
    };

    // potential suite
    if (potential.satisfies_w1()) {
        bool positive = true;
        for (int k = 0; k <= 1000; ++k) {
            const double r = -0.999 + 1.998 * k / 1000.0;
            if (potential.w(r) < -1e-12) positive = false;
        }
        bool blowup = true;
        double prev = potential.w(1.0 - 1e-2);
        for (int k = 3; k <= 8; ++k) {
            const double cur = potential.w(1.0 - std::pow(10.0, -k));
            if (!(cur > prev)) blowup = false;
            prev = cur;
        }
        report("potential positivity", positive, "");
        report("potential barrier blow-up", blowup, "");
    } else {
        report("potential barrier", true, "bounded family; separation via W-bound unavailable");
    }
    const auto w2 = check_semiconvexity(potential, cfg.potential_samples);
    report("potential semiconvexity", w2.passed,
           "lambda=" + fmt(potential.lambda()) + " min_slack=" + fmt(w2.min_slack));
    const auto w25 = check_w25(potential, cfg.potential_samples);
    report("potential derivative product bound", w25.passed, "min_slack=" + fmt(w25.min_slack));

    // kernel suite
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto random_field = [&]() {
        ScalarField f = make_field(grid, FieldTag::Other);
        for (auto& v : f.values) v = unit(rng);
        return f;
    };
    double max_asym = 0.0, max_fast_err = 0.0, max_norm_excess = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField v = random_field();
        const ScalarField w = random_field();
        const ScalarField jv = op.apply_direct(v);
        const ScalarField jw = op.apply_direct(w);
        const double asym = std::fabs(inner(jv, w) - inner(v, jw)) /
                            std::max(1e-300, norm_l2(v) * norm_l2(w));
        max_asym = std::max(max_asym, asym);
        const ScalarField fv = op.apply_fast(v);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < fv.values.size(); ++i) {
            num += (fv.values[i] - jv.values[i]) * (fv.values[i] - jv.values[i]);
            den += jv.values[i] * jv.values[i];
        }
        max_fast_err = std::max(max_fast_err, std::sqrt(num) / std::max(std::sqrt(den), 1e-300));
        max_norm_excess =
            std::max(max_norm_excess, norm_l2(jv) - op.k1() * norm_l2(v));
    }
    report("kernel self-adjointness", max_asym <= 1e-12, "max=" + fmt(max_asym));
    report("kernel fast == direct", max_fast_err <= 1e-10, "max_rel=" + fmt(max_fast_err));
    report("kernel operator bound", max_norm_excess <= 1e-12, "excess=" + fmt(max_norm_excess));
    {
        const ScalarField ones = make_field(grid, FieldTag::Other, 1.0);
        const ScalarField j1 = op.apply_direct(ones);
        bool same = true;
        for (std::size_t i = 0; i < j1.values.size(); ++i)
            if (j1.values[i] != op.kappa().values[i]) same = false;
        report("kernel kappa == J[1]", same, "");
    }

    // projector suite
    const double lam0 = lambda0(op, potential);
    report("lambda0 = kappa_min - lambda", true,
           fmt(lam0) + (lam0 > 0.0 ? " (> 0)" : " (<= 0: attractor experiments gated off)"));
    if (lam0 > 0.0 && grid.total() <= cfg.eigen_cap) {
        const Spectrum spectrum = eigendecompose(op, cfg.eigen_cap);
        report("eigendecomposition residual", spectrum.max_residual <= 1e-8,
               "max=" + fmt(spectrum.max_residual));
        const Projector proj = Projector::build(op, spectrum, lam0, cfg.c_lambda0);
        double min_slack = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 200; ++trial) {
            const ScalarField v = random_field();
            const double lhs = norm_l2(op.apply_direct(v));
            const double vn = norm_l2(v);
            const double pn = proj.norm_applied(v);
            min_slack = std::min(min_slack,
                                 proj.threshold() * vn * vn + pn * pn - lhs * lhs);
        }
        report("projector inequality (rank " + std::to_string(proj.rank()) + ")",
               min_slack >= -1e-10, "min_slack=" + fmt(min_slack));
    }

    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
              << "\n";
    return failures == 0 ? kExitOk : kExitNumeric;
}

int cmd_steady(const CliOptions& opt) {
    const SimConfig cfg = load_config(opt);
    ManifestScope scope(cfg, opt.out_dir);
    const DomainGrid grid = cfg.make_grid();
    const PotentialSpec potential = cfg.make_potential();
    const NonlocalOperator op = NonlocalOperator::build(grid, cfg.kernel, cfg.strategy);
    const SystemState ic = make_initial_state(cfg, grid);

    const SteadyResult res = steady_state(op, potential, cfg.alpha, cfg.source, ic.chi,
                                          cfg.steady_tol, cfg.steady_max_iters,
                                          cfg.steady_relaxation);
    const fs::path out_path = scope.dir / "steady_chi.txt";
    write_field_file(out_path, res.chi, 0.0);
    scope.add(out_path);
    if (!opt.quiet) {
        std::cout << "residual = " << fmt(res.residual) << "\n"
                  << "iterations = " << res.iterations << "\n"
                  << "lambda0 = " << fmt(lambda0(op, potential)) << "\n";
    }
    scope.finish(kExitOk);
    return kExitOk;
}

int cmd_spectrum(const CliOptions& opt) {
    const SimConfig cfg = load_config(opt);
    ManifestScope scope(cfg, opt.out_dir);
    const NonlocalOperator op = cfg.make_operator();
    const Spectrum spectrum = eigendecompose(op, cfg.eigen_cap);

    const fs::path csv_path = opt.out_csv.empty() ? scope.dir / "spectrum.csv" : fs::path(opt.out_csv);
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
    csv << "index,eigenvalue\n";
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
        csv << i << "," << fmt(spectrum.eigenvalues[i]) << "\n";
    csv.flush();
    if (!csv) throw IoError("write failed for '" + csv_path.string() + "'");
    scope.add(csv_path);
    if (!opt.quiet) {
        std::cout << "modes = " << spectrum.eigenvalues.size() << "\n"
                  << "mu_1 = " << fmt(spectrum.eigenvalues.front()) << "\n"
                  << "max_residual = " << fmt(spectrum.max_residual) << "\n";
    }
    scope.finish(kExitOk);
    return kExitOk;
}

int cmd_contract(const CliOptions& opt) {
    const SimConfig cfg = load_config(opt);
    if (opt.ic2_path.empty()) throw ConfigError("contract requires --ic2 <state file>");
    ManifestScope scope(cfg, opt.out_dir);
    const DomainGrid grid = cfg.make_grid();
    const PotentialSpec potential = cfg.make_potential();
    const NonlocalOperator op = NonlocalOperator::build(grid, cfg.kernel, cfg.strategy);

    const double lam0 = lambda0(op, potential);
    if (!(lam0 > 0.0))
        throw NumericError("assumption (Wconv) violated: lambda0 = " + fmt(lam0));
    const Spectrum spectrum = eigendecompose(op, cfg.eigen_cap);
    const Projector projector = Projector::build(op, spectrum, lam0, cfg.c_lambda0);

    const SystemState ic1 = make_initial_state(cfg, grid);
    const SystemState ic2 = read_state(opt.ic2_path, grid);
    const ContractionResult res = pair_contraction_experiment(cfg, ic1, ic2, projector);

    const fs::path csv_path = scope.dir / "contract.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
    csv << "t,D,K,grad_dtheta_sq,l2_dchi_sq,l2_dtheta_sq,proj_dchi_sq\n";
    for (const auto& s : res.series)
        csv << fmt(s.t) << "," << fmt(s.d_value) << "," << fmt(s.k_value) << ","
            << fmt(s.grad_dtheta_sq) << "," << fmt(s.l2_dchi_sq) << "," << fmt(s.l2_dtheta_sq)
            << "," << fmt(s.proj_dchi_sq) << "\n";
    csv.flush();
    if (!csv) throw IoError("write failed for '" + csv_path.string() + "'");
    scope.add(csv_path);

    const fs::path fit_path = scope.dir / "contract_fit.txt";
    std::ofstream fit(fit_path);
    if (!fit) throw IoError("cannot open '" + fit_path.string() + "' for writing");
    fit << "mu2 = " << fmt(res.mu2) << "\n"
        << "mu3 = " << fmt(res.mu3) << "\n"
        << "C = " << fmt(res.c_fit) << "\n"
        << "d_T = " << fmt(res.d_t) << "\n"
        << "min_slack = " << fmt(res.min_slack) << "\n"
        << "delta_run = " << fmt(res.delta_run) << "\n"
        << "projector_rank = " << projector.rank() << "\n";
    fit.flush();
    scope.add(fit_path);

    if (!opt.quiet) {
        std::cout << "mu3 = " << fmt(res.mu3) << "\n"
                  << "C = " << fmt(res.c_fit) << "\n"
                  << "d_T = " << fmt(res.d_t) << "\n"
                  << "projector_rank = " << projector.rank() << "\n";
    }
    scope.finish(kExitOk);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"config-driven simulator for a heat equation coupled to a nonlocal,"
                 " singular-potential phase equation"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "path to the flat-key config file");
    app.add_option("--out-dir", opt.out_dir, "output directory (default .)");
    app.add_option("--seed", opt.seed, "override ic.seed for random initial data");
    app.add_flag("--quiet", opt.quiet, "suppress the summary printout");

    auto* simulate = app.add_subcommand("simulate", "integrate the system and stream diagnostics");
    simulate->add_option("--out", opt.out_csv, "diagnostics CSV path (default <out-dir>/diagnostics.csv)");
    simulate->add_option("--snapshots", opt.snapshots_dir, "directory for state snapshots at cadence");

    auto* check = app.add_subcommand("check", "run the potential/kernel/projector invariant suites");
    auto* steady = app.add_subcommand("steady", "solve the f = 0 steady phase equation");
    auto* spectrum = app.add_subcommand("spectrum", "dump the operator spectrum as CSV");
    auto* contract = app.add_subcommand("contract", "two-trajectory contraction experiment");
    contract->add_option("--ic2", opt.ic2_path, "state snapshot for the second trajectory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (check->parsed()) return cmd_check(opt);
        if (steady->parsed()) return cmd_steady(opt);
        if (spectrum->parsed()) return cmd_spectrum(opt);
        if (contract->parsed()) return cmd_contract(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
