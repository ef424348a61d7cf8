#include "nlpf/manifest.hpp"

#include <fstream>

#include "nlpf/errors.hpp"

namespace nlpf {

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "config_hash = " << m.config_hash << "\n";
    out << "version = " << m.version << "\n";
    for (const auto& line : m.echo) out << "echo = " << line << "\n";
    out << "duration_seconds = " << m.duration_seconds << "\n";
    out << "exit_status = " << m.exit_status << "\n";
    for (const auto& a : m.artifacts) out << "artifact = " << a << "\n";
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace nlpf
