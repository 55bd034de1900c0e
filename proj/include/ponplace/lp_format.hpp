#pragma once

#include <iosfwd>
#include <string>

#include "ponplace/milp.hpp"

namespace ponplace {

// Writes the instance in LP text format (Minimize / Subject To / Bounds /
// Binaries / End). Variable and constraint names are the stable ones from
// milp.hpp; numbers use shortest round-trip decimal form, so identical
// instances produce byte-identical files.
void export_lp(const MilpInstance& instance, std::ostream& out);
std::string to_lp_string(const MilpInstance& instance);

}  // namespace ponplace
