#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace gkdv {

/// FNV-1a 64-bit over the canonical (sorted-key) JSON dump; covers every
/// numeric input, so equal hashes mean bit-identical reruns at fixed thread
/// count.
std::uint64_t content_hash(const nlohmann::json& j);

struct RunManifest {
    std::string scenario;
    nlohmann::json inputs;

    std::uint64_t hash() const;
    nlohmann::json to_json() const;
};

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace gkdv
