#pragma once

#include <iosfwd>
#include <string>

#include "gkdv/grid.hpp"

namespace gkdv {

/// CSV layout: one header line `# grid: kind,left,right,count` followed by
/// one `x,value` row per node, 17 significant digits (bit-exact round trip).
void write_field_csv(std::ostream& os, const Field& f);
Field read_field_csv(std::istream& is);

void save_field_csv(const std::string& path, const Field& f);
Field load_field_csv(const std::string& path);

std::string field_to_json(const Field& f);
Field field_from_json(const std::string& text);

}  // namespace gkdv
