#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "nlpf/grid.hpp"

namespace nlpf {

struct SystemState;

/// Field snapshot block:
///   # grid d n1 [n2] L1 [L2] tag time
/// followed by one node value per line in the grid's lexicographic order,
/// printed with 17 significant digits (lossless decimal round trip).
void write_field(std::ostream& out, const ScalarField& field, double time);
void write_field_file(const std::filesystem::path& path, const ScalarField& field, double time);

struct FieldBlock {
    ScalarField field;
    double time = 0.0;
};

/// Reads the next field block; std::nullopt at clean EOF. Malformed input is
/// an IoError with the line number; chi blocks violating |value| < 1 are a
/// NumericError naming the node.
std::optional<FieldBlock> read_field(std::istream& in, int& lineno, const std::string& origin);
FieldBlock read_field_file(const std::filesystem::path& path);

/// A state file is a theta block followed by a chi block with identical grid
/// and time headers.
void write_state(const std::filesystem::path& path, const SystemState& state);
SystemState read_state(const std::filesystem::path& path);
SystemState read_state(const std::filesystem::path& path, const DomainGrid& expected);

}  // namespace nlpf
