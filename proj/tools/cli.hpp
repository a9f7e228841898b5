#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gfaccess::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the command line; returns the process exit code. Normal output goes
/// to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gfaccess::cli
