#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "nlpf/grid.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/potential.hpp"

namespace nlpf {

/// Fully resolved run configuration. Parsed from flat `section.key = value`
/// text; unknown keys, duplicates, type mismatches and constraint violations
/// are hard errors carrying the line number. All defaults are documented by
/// `nlpf --help` and by canonical_config().
struct SimConfig {
    // grid
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<int, 2> node_counts{63, 1};

    // kernel
    KernelSpec kernel;
    ConvStrategy strategy = ConvStrategy::Fast;
    int eigen_cap = 4096;

    // potential
    PotentialFamily potential_family = PotentialFamily::HardLog;
    double c1 = 1.0;
    double lambda_w = 0.0;
    double doublelog_lambda = 0.0;
    int potential_samples = 10001;

    // time stepping
    double alpha = 1.0;
    double dt = 0.0;       // required
    double t_final = 0.0;  // required
    int cadence = 1;
    double newton_tol = 1e-12;
    int newton_max_iters = 50;
    double linear_tol = 1e-10;
    int linear_max_iters = 10000;
    double source = 0.0;      // constant heat source f
    std::string source_path;  // optional field file overriding the constant

    // initial data
    double delta0 = 0.05;
    std::string theta_profile = "zero";  // zero|constant|sine|random|file
    double theta_value = 0.0;
    double theta_amplitude = 1.0;
    int theta_mode = 1;
    std::string theta_path;
    std::string chi_profile = "constant";  // zero|constant|sine|random|file
    double chi_value = 0.0;
    double chi_amplitude = 0.2;
    int chi_mode = 1;
    std::string chi_path;
    std::uint64_t seed = 12345;

    // diagnostics functionals (xi < 0 means: resolve to min(0.25, 1/(4(1+α²))))
    double xi = -1.0;
    double eta = 0.5;
    double sigma = 0.5;

    // attractor / steady-state experiments
    double c_lambda0 = 1.0;
    double radius = 0.0;  // 0 = derive from fits
    double steady_tol = 1e-12;
    int steady_max_iters = 20000;
    double steady_relaxation = 1.0;

    DomainGrid make_grid() const;
    PotentialSpec make_potential() const;
    NonlocalOperator make_operator() const;

    bool operator==(const SimConfig&) const = default;
};

SimConfig parse_config(const std::filesystem::path& path);
SimConfig parse_config_text(std::string_view text, const std::string& origin,
                            const std::optional<std::filesystem::path>& base_dir = {});

/// Every key, fixed order, 17-significant-digit doubles. Re-parsing this text
/// reproduces the SimConfig exactly.
std::string canonical_config(const SimConfig& cfg);

/// FNV-1a over the canonical text; equal for semantically equal configs.
std::string config_hash(const SimConfig& cfg);

}  // namespace nlpf
