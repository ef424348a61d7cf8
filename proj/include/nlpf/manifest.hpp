#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlpf {

inline constexpr const char* kVersion = "nlpf 0.1.0";

/// Reproducibility sidecar written next to every subcommand's outputs.
struct RunManifest {
    std::string config_hash;
    std::string version = kVersion;
    std::vector<std::string> echo;  // grid/kernel/potential summary lines
    double duration_seconds = 0.0;
    int exit_status = 0;
    std::vector<std::string> artifacts;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace nlpf
