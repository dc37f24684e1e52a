#include "gkdv/manifest.hpp"

#include <fstream>
#include <stdexcept>

namespace gkdv {

std::uint64_t content_hash(const nlohmann::json& j) {
    const std::string dump = j.dump();  // nlohmann objects iterate in sorted key order
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t RunManifest::hash() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["inputs"] = inputs;
    return content_hash(j);
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["inputs"] = inputs;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    j["hash"] = buf;
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << '\n';
}

}  // namespace gkdv
