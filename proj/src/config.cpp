#include "nlpf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nlpf/errors.hpp"

namespace nlpf {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct RawConfig {
    std::string origin;
    std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
    }

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    template <typename F>
    void take(const std::string& key, F&& consume) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        consume(it->second.first, it->second.second);
        entries.erase(it);
    }

    double to_double(const std::string& key, const std::string& value, int line) const {
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
            fail(line, "key '" + key + "': expected a finite number, got '" + value + "'");
        return v;
    }

    long long to_int(const std::string& key, const std::string& value, int line) const {
        char* end = nullptr;
        const long long v = std::strtoll(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0')
            fail(line, "key '" + key + "': expected an integer, got '" + value + "'");
        return v;
    }
};

RawConfig tokenize(std::string_view text, const std::string& origin) {
    RawConfig raw;
    raw.origin = origin;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            raw.fail(lineno, "expected 'section.key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) raw.fail(lineno, "empty key");
        if (raw.entries.count(key))
            raw.fail(lineno, "duplicate key '" + key + "' (first set on line " +
                                 std::to_string(raw.entries[key].second) + ")");
        raw.entries[key] = {value, lineno};
    }
    return raw;
}

}  // namespace

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string(), path.parent_path());
}

SimConfig parse_config_text(std::string_view text, const std::string& origin,
                            const std::optional<std::filesystem::path>& base_dir) {
    RawConfig raw = tokenize(text, origin);
    SimConfig cfg;

    auto dbl = [&](const std::string& key, double& slot) {
        raw.take(key, [&](const std::string& v, int ln) { slot = raw.to_double(key, v, ln); });
    };
    auto integer = [&](const std::string& key, int& slot) {
        raw.take(key, [&](const std::string& v, int ln) {
            slot = static_cast<int>(raw.to_int(key, v, ln));
        });
    };
    auto str = [&](const std::string& key, std::string& slot) {
        raw.take(key, [&](const std::string& v, int) { slot = v; });
    };
    auto require = [&](const std::string& key) {
        if (!raw.has(key)) throw ConfigError(origin + ": missing required key '" + key + "'");
    };

    require("grid.dim");
    require("grid.length1");
    require("grid.n1");
    require("sim.dt");
    require("sim.t_final");

    integer("grid.dim", cfg.dim);
    if (cfg.dim != 1 && cfg.dim != 2)
        throw ConfigError(origin + ": grid.dim must be 1 or 2 (d = 3 is unsupported)");
    dbl("grid.length1", cfg.lengths[0]);
    integer("grid.n1", cfg.node_counts[0]);
    if (cfg.dim == 2) {
        require("grid.length2");
        require("grid.n2");
        dbl("grid.length2", cfg.lengths[1]);
        integer("grid.n2", cfg.node_counts[1]);
    } else {
        if (raw.has("grid.length2") || raw.has("grid.n2"))
            throw ConfigError(origin + ": grid.length2 / grid.n2 set but grid.dim = 1");
        cfg.lengths[1] = 1.0;
        cfg.node_counts[1] = 1;
    }

    std::string kernel_family = "gaussian";
    str("kernel.family", kernel_family);
    double kernel_amplitude = 1.0, kernel_width = 0.1, kernel_radius = 0.1;
    std::string kernel_table_path;
    dbl("kernel.amplitude", kernel_amplitude);
    dbl("kernel.width", kernel_width);
    dbl("kernel.radius", kernel_radius);
    str("kernel.table_path", kernel_table_path);
    if (kernel_family == "gaussian") {
        cfg.kernel.family = KernelFamily::Gaussian;
        if (!(kernel_width > 0.0)) throw ConfigError(origin + ": kernel.width must be > 0");
    } else if (kernel_family == "mollifier") {
        cfg.kernel.family = KernelFamily::Mollifier;
        if (!(kernel_radius > 0.0)) throw ConfigError(origin + ": kernel.radius must be > 0");
    } else if (kernel_family == "table") {
        if (kernel_table_path.empty())
            throw ConfigError(origin + ": kernel.family = table requires kernel.table_path");
        std::filesystem::path p = kernel_table_path;
        if (p.is_relative() && base_dir) p = *base_dir / p;
        cfg.kernel = load_table_kernel(p, kernel_amplitude);
    } else {
        throw ConfigError(origin + ": kernel.family must be gaussian, mollifier or table");
    }
    cfg.kernel.amplitude = kernel_amplitude;
    cfg.kernel.width = kernel_width;
    cfg.kernel.radius = kernel_radius;
    if (cfg.kernel.family != KernelFamily::Table) cfg.kernel.table_path = kernel_table_path;

    std::string strategy = "fast";
    str("kernel.strategy", strategy);
    if (strategy == "fast")
        cfg.strategy = ConvStrategy::Fast;
    else if (strategy == "direct")
        cfg.strategy = ConvStrategy::Direct;
    else
        throw ConfigError(origin + ": kernel.strategy must be fast or direct");
    integer("kernel.eigen_cap", cfg.eigen_cap);
    if (cfg.eigen_cap < 1) throw ConfigError(origin + ": kernel.eigen_cap must be >= 1");

    std::string pot_family = "hardlog";
    str("potential.family", pot_family);
    if (pot_family == "hardlog")
        cfg.potential_family = PotentialFamily::HardLog;
    else if (pot_family == "doublelog")
        cfg.potential_family = PotentialFamily::DoubleLog;
    else
        throw ConfigError(origin + ": potential.family must be hardlog or doublelog");
    dbl("potential.c1", cfg.c1);
    dbl("potential.lambda_w", cfg.lambda_w);
    dbl("potential.lambda", cfg.doublelog_lambda);
    integer("potential.samples", cfg.potential_samples);
    if (cfg.potential_samples < 100)
        throw ConfigError(origin + ": potential.samples must be >= 100");

    dbl("sim.alpha", cfg.alpha);
    dbl("sim.dt", cfg.dt);
    if (!(cfg.dt > 0.0)) throw ConfigError(origin + ": sim.dt must be > 0");
    dbl("sim.t_final", cfg.t_final);
    if (!(cfg.t_final >= 0.0)) throw ConfigError(origin + ": sim.t_final must be >= 0");
    integer("sim.cadence", cfg.cadence);
    if (cfg.cadence < 1) throw ConfigError(origin + ": sim.cadence must be >= 1");
    dbl("sim.newton_tol", cfg.newton_tol);
    if (!(cfg.newton_tol > 0.0)) throw ConfigError(origin + ": sim.newton_tol must be > 0");
    integer("sim.newton_max_iters", cfg.newton_max_iters);
    if (cfg.newton_max_iters < 1)
        throw ConfigError(origin + ": sim.newton_max_iters must be >= 1");
    dbl("sim.linear_tol", cfg.linear_tol);
    if (!(cfg.linear_tol > 0.0)) throw ConfigError(origin + ": sim.linear_tol must be > 0");
    integer("sim.linear_max_iters", cfg.linear_max_iters);
    dbl("sim.source", cfg.source);
    str("sim.source_path", cfg.source_path);

    dbl("ic.delta0", cfg.delta0);
    if (!(cfg.delta0 > 0.0 && cfg.delta0 < 1.0))
        throw ConfigError(origin + ": ic.delta0 must lie in (0,1)");
    str("ic.theta_profile", cfg.theta_profile);
    dbl("ic.theta_value", cfg.theta_value);
    dbl("ic.theta_amplitude", cfg.theta_amplitude);
    integer("ic.theta_mode", cfg.theta_mode);
    str("ic.theta_path", cfg.theta_path);
    str("ic.chi_profile", cfg.chi_profile);
    dbl("ic.chi_value", cfg.chi_value);
    dbl("ic.chi_amplitude", cfg.chi_amplitude);
    integer("ic.chi_mode", cfg.chi_mode);
    str("ic.chi_path", cfg.chi_path);
    raw.take("ic.seed", [&](const std::string& v, int ln) {
        const long long s = raw.to_int("ic.seed", v, ln);
        if (s < 0) raw.fail(ln, "ic.seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(s);
    });
    for (const std::string* p : {&cfg.theta_profile, &cfg.chi_profile}) {
        if (*p != "zero" && *p != "constant" && *p != "sine" && *p != "random" && *p != "file")
            throw ConfigError(origin + ": ic profile must be zero, constant, sine, random or file");
    }

    dbl("diagnostics.xi", cfg.xi);
    dbl("diagnostics.eta", cfg.eta);
    dbl("diagnostics.sigma", cfg.sigma);
    if (cfg.xi < 0.0) cfg.xi = std::min(0.25, 1.0 / (4.0 * (1.0 + cfg.alpha * cfg.alpha)));
    if (!(cfg.eta > 0.0) || !(cfg.sigma > 0.0))
        throw ConfigError(origin + ": diagnostics.eta and diagnostics.sigma must be > 0");

    dbl("attractor.c_lambda0", cfg.c_lambda0);
    if (!(cfg.c_lambda0 > 0.0)) throw ConfigError(origin + ": attractor.c_lambda0 must be > 0");
    dbl("attractor.radius", cfg.radius);
    dbl("steady.tol", cfg.steady_tol);
    integer("steady.max_iters", cfg.steady_max_iters);
    dbl("steady.relaxation", cfg.steady_relaxation);
    if (!(cfg.steady_relaxation > 0.0 && cfg.steady_relaxation <= 1.0))
        throw ConfigError(origin + ": steady.relaxation must lie in (0,1]");

    if (!raw.entries.empty()) {
        const auto& [key, tagged] = *raw.entries.begin();
        throw ConfigError(origin + ":" + std::to_string(tagged.second) + ": unknown key '" + key +
                          "'");
    }

    // early validation of the derived pieces
    cfg.make_grid();
    cfg.make_potential();
    return cfg;
}

DomainGrid SimConfig::make_grid() const {
    return build_grid(dim, std::span<const double>(lengths.data(), static_cast<std::size_t>(dim)),
                      std::span<const int>(node_counts.data(), static_cast<std::size_t>(dim)));
}

PotentialSpec SimConfig::make_potential() const {
    if (potential_family == PotentialFamily::HardLog)
        return PotentialSpec::hard_log(c1, lambda_w);
    return PotentialSpec::double_log(doublelog_lambda);
}

NonlocalOperator SimConfig::make_operator() const {
    return NonlocalOperator::build(make_grid(), kernel, strategy);
}

std::string canonical_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "grid.dim = " << cfg.dim << "\n";
    out << "grid.length1 = " << fmt_double(cfg.lengths[0]) << "\n";
    out << "grid.n1 = " << cfg.node_counts[0] << "\n";
    if (cfg.dim == 2) {
        out << "grid.length2 = " << fmt_double(cfg.lengths[1]) << "\n";
        out << "grid.n2 = " << cfg.node_counts[1] << "\n";
    }
    out << "kernel.family = " << to_string(cfg.kernel.family) << "\n";
    out << "kernel.amplitude = " << fmt_double(cfg.kernel.amplitude) << "\n";
    out << "kernel.width = " << fmt_double(cfg.kernel.width) << "\n";
    out << "kernel.radius = " << fmt_double(cfg.kernel.radius) << "\n";
    out << "kernel.table_path = " << cfg.kernel.table_path << "\n";
    out << "kernel.strategy = " << to_string(cfg.strategy) << "\n";
    out << "kernel.eigen_cap = " << cfg.eigen_cap << "\n";
    out << "potential.family = " << to_string(cfg.potential_family) << "\n";
    out << "potential.c1 = " << fmt_double(cfg.c1) << "\n";
    out << "potential.lambda_w = " << fmt_double(cfg.lambda_w) << "\n";
    out << "potential.lambda = " << fmt_double(cfg.doublelog_lambda) << "\n";
    out << "potential.samples = " << cfg.potential_samples << "\n";
    out << "sim.alpha = " << fmt_double(cfg.alpha) << "\n";
    out << "sim.dt = " << fmt_double(cfg.dt) << "\n";
    out << "sim.t_final = " << fmt_double(cfg.t_final) << "\n";
    out << "sim.cadence = " << cfg.cadence << "\n";
    out << "sim.newton_tol = " << fmt_double(cfg.newton_tol) << "\n";
    out << "sim.newton_max_iters = " << cfg.newton_max_iters << "\n";
    out << "sim.linear_tol = " << fmt_double(cfg.linear_tol) << "\n";
    out << "sim.linear_max_iters = " << cfg.linear_max_iters << "\n";
    out << "sim.source = " << fmt_double(cfg.source) << "\n";
    out << "sim.source_path = " << cfg.source_path << "\n";
    out << "ic.delta0 = " << fmt_double(cfg.delta0) << "\n";
    out << "ic.theta_profile = " << cfg.theta_profile << "\n";
    out << "ic.theta_value = " << fmt_double(cfg.theta_value) << "\n";
    out << "ic.theta_amplitude = " << fmt_double(cfg.theta_amplitude) << "\n";
    out << "ic.theta_mode = " << cfg.theta_mode << "\n";
    out << "ic.theta_path = " << cfg.theta_path << "\n";
    out << "ic.chi_profile = " << cfg.chi_profile << "\n";
    out << "ic.chi_value = " << fmt_double(cfg.chi_value) << "\n";
    out << "ic.chi_amplitude = " << fmt_double(cfg.chi_amplitude) << "\n";
    out << "ic.chi_mode = " << cfg.chi_mode << "\n";
    out << "ic.chi_path = " << cfg.chi_path << "\n";
    out << "ic.seed = " << cfg.seed << "\n";
    out << "diagnostics.xi = " << fmt_double(cfg.xi) << "\n";
    out << "diagnostics.eta = " << fmt_double(cfg.eta) << "\n";
    out << "diagnostics.sigma = " << fmt_double(cfg.sigma) << "\n";
    out << "attractor.c_lambda0 = " << fmt_double(cfg.c_lambda0) << "\n";
    out << "attractor.radius = " << fmt_double(cfg.radius) << "\n";
    out << "steady.tol = " << fmt_double(cfg.steady_tol) << "\n";
    out << "steady.max_iters = " << cfg.steady_max_iters << "\n";
    out << "steady.relaxation = " << fmt_double(cfg.steady_relaxation) << "\n";
    return out.str();
}

std::string config_hash(const SimConfig& cfg) {
    const std::string text = canonical_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nlpf
