#include "gkdv/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gkdv {

namespace {

const char* kind_name(GridKind k) {
    return k == GridKind::PeriodicUniform ? "periodic-uniform" : "bounded-uniform";
}

GridKind kind_from_name(const std::string& s) {
    if (s == "periodic-uniform") return GridKind::PeriodicUniform;
    if (s == "bounded-uniform") return GridKind::BoundedUniform;
    throw std::invalid_argument("unknown grid kind: " + s);
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_field_csv(std::ostream& os, const Field& f) {
    const Grid1D& g = f.grid();
    os << "# grid: " << kind_name(g.kind()) << ',' << fmt17(g.left()) << ',' << fmt17(g.right())
       << ',' << g.count() << '\n';
    for (std::size_t i = 0; i < g.count(); ++i)
        os << fmt17(g.node(i)) << ',' << fmt17(f[i]) << '\n';
}

Field read_field_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("field CSV: missing header");
    const std::string prefix = "# grid: ";
    if (header.rfind(prefix, 0) != 0) throw std::runtime_error("field CSV: bad header");
    std::stringstream hs(header.substr(prefix.size()));
    std::string kind, left, right, count;
    if (!std::getline(hs, kind, ',') || !std::getline(hs, left, ',') ||
        !std::getline(hs, right, ',') || !std::getline(hs, count, ','))
        throw std::runtime_error("field CSV: malformed header");
    Grid1D grid(kind_from_name(kind), std::stod(left), std::stod(right),
                static_cast<std::size_t>(std::stoull(count)));
    std::vector<double> samples;
    samples.reserve(grid.count());
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("field CSV: malformed row");
        samples.push_back(std::stod(line.substr(comma + 1)));
    }
    return Field(grid, std::move(samples));
}

void save_field_csv(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_field_csv(os, f);
}

Field load_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_field_csv(is);
}

std::string field_to_json(const Field& f) {
    nlohmann::json j;
    j["grid"] = {{"kind", kind_name(f.grid().kind())},
                 {"left", f.grid().left()},
                 {"right", f.grid().right()},
                 {"count", f.grid().count()}};
    j["samples"] = std::vector<double>(f.samples().begin(), f.samples().end());
    return j.dump();
}

Field field_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Grid1D grid(kind_from_name(j.at("grid").at("kind").get<std::string>()),
                j.at("grid").at("left").get<double>(), j.at("grid").at("right").get<double>(),
                j.at("grid").at("count").get<std::size_t>());
    return Field(grid, j.at("samples").get<std::vector<double>>());
}

}  // namespace gkdv
