#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gfaccess/codebook.hpp"

namespace gfaccess {

/// Directory holding the bundled codebook files; GF_ACCESS_DATA overrides
/// the build-time default.
std::filesystem::path data_directory();

/// The eight systems of the design table, in table order.
const std::vector<std::string>& table_systems();

/// Accepts "S(2,4,25)", "S_2_4_25", "2,4,25" or a file path.
std::filesystem::path resolve_system(const std::string& name_or_path);

PatternCodebook load_system(const std::string& name_or_path);

}  // namespace gfaccess
