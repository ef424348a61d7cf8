#include "nlpf/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlpf/errors.hpp"
#include "nlpf/state.hpp"

namespace nlpf {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& field, double time) {
    const DomainGrid& g = field.grid;
    out << "# grid " << g.dim << " " << g.nodes[0];
    if (g.dim == 2) out << " " << g.nodes[1];
    out << " " << fmt(g.length[0]);
    if (g.dim == 2) out << " " << fmt(g.length[1]);
    out << " " << to_string(field.tag) << " " << fmt(time) << "\n";
    for (double v : field.values) out << fmt(v) << "\n";
}

void write_field_file(const std::filesystem::path& path, const ScalarField& field, double time) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_field(out, field, time);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::optional<FieldBlock> read_field(std::istream& in, int& lineno, const std::string& origin) {
    std::string line;
    // locate the header
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        break;
    }
    if (in.eof() && line.empty()) return std::nullopt;
    std::istringstream hs(line);
    std::string hash, word;
    hs >> hash >> word;
    if (hash != "#" || word != "grid")
        throw IoError(origin + ":" + std::to_string(lineno) + ": expected header '# grid ...'");
    int dim = 0;
    if (!(hs >> dim) || (dim != 1 && dim != 2))
        throw IoError(origin + ":" + std::to_string(lineno) + ": bad dimension in header");
    std::array<int, 2> n{0, 1};
    std::array<double, 2> len{0.0, 1.0};
    if (!(hs >> n[0])) throw IoError(origin + ":" + std::to_string(lineno) + ": bad node count");
    if (dim == 2 && !(hs >> n[1]))
        throw IoError(origin + ":" + std::to_string(lineno) + ": bad node count");
    if (!(hs >> len[0])) throw IoError(origin + ":" + std::to_string(lineno) + ": bad length");
    if (dim == 2 && !(hs >> len[1]))
        throw IoError(origin + ":" + std::to_string(lineno) + ": bad length");
    std::string tag_str;
    double time = 0.0;
    if (!(hs >> tag_str >> time))
        throw IoError(origin + ":" + std::to_string(lineno) + ": bad tag/time in header");

    FieldBlock blk;
    blk.time = time;
    DomainGrid grid =
        build_grid(dim, std::span<const double>(len.data(), static_cast<std::size_t>(dim)),
                   std::span<const int>(n.data(), static_cast<std::size_t>(dim)));
    blk.field = make_field(grid, field_tag_from_string(tag_str));
    for (std::int64_t i = 0; i < grid.total(); ++i) {
        if (!std::getline(in, line))
            throw IoError(origin + ": unexpected end of file, expected " +
                          std::to_string(grid.total()) + " values, got " + std::to_string(i));
        ++lineno;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str())
            throw IoError(origin + ":" + std::to_string(lineno) + ": expected a value");
        while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
        if (*end != '\0')
            throw IoError(origin + ":" + std::to_string(lineno) + ": trailing junk after value");
        blk.field.values[i] = v;
    }
    validate_field(blk.field);
    return blk;
}

FieldBlock read_field_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    int lineno = 0;
    auto blk = read_field(in, lineno, path.string());
    if (!blk) throw IoError("'" + path.string() + "' contains no field block");
    return *blk;
}

void write_state(const std::filesystem::path& path, const SystemState& state) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_field(out, state.theta, state.time);
    write_field(out, state.chi, state.time);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SystemState read_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    int lineno = 0;
    auto theta = read_field(in, lineno, path.string());
    auto chi = read_field(in, lineno, path.string());
    if (!theta || !chi)
        throw IoError("'" + path.string() + "' must contain a theta block and a chi block");
    if (theta->field.tag != FieldTag::Theta || chi->field.tag != FieldTag::Chi)
        throw IoError("'" + path.string() + "' blocks must be tagged theta then chi");
    if (!(theta->field.grid == chi->field.grid))
        throw IoError("'" + path.string() + "' theta/chi grids differ");
    if (theta->time != chi->time)
        throw IoError("'" + path.string() + "' theta/chi times differ");
    SystemState s = make_state(theta->field.grid);
    s.theta.values = theta->field.values;
    s.chi.values = chi->field.values;
    s.time = theta->time;
    validate_state(s);
    return s;
}

SystemState read_state(const std::filesystem::path& path, const DomainGrid& expected) {
    SystemState s = read_state(path);
    if (!(s.theta.grid == expected))
        throw IoError("'" + path.string() + "' grid header does not match the expected grid");
    return s;
}

}  // namespace nlpf
