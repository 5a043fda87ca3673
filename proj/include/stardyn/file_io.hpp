#pragma once

#include <filesystem>
#include <string>

namespace stardyn {

// Throws std::runtime_error when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

// Writes `text` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace stardyn
