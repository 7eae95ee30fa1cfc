#pragma once
// File helpers shared by the library and the CLI.

#include <string>

namespace apcalc {

std::string read_file(const std::string& path);

// Writes to <path>.tmp.<pid> then renames, so readers never observe a
// partially written file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace apcalc
