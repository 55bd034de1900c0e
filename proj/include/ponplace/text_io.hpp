#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ponplace {

// Shortest decimal form that round-trips exactly through from_chars.
// Used for every numeric field we serialize so that identical inputs give
// byte-identical files.
std::string fmt_double(double v);

double parse_double(std::string_view tok, const std::string& what);
std::int64_t parse_i64(std::string_view tok, const std::string& what);
std::uint64_t parse_u64(std::string_view tok, const std::string& what);

std::uint64_t fnv1a64(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" in the same directory, then renames over the target,
// so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ponplace
