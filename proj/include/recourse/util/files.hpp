#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace recourse {

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Throws Error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// 64-bit FNV-1a of `bytes`, 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace recourse
