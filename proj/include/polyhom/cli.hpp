#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyhom::cli {

inline constexpr int schema_version = 1;

/// Exit codes: 0 verdict computed, 1 inconclusive under budget, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace polyhom::cli
