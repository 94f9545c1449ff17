#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace girit::io {

/// Whole-file read; throws ValidationError when the file cannot be opened.
[[nodiscard]] auto read_file(std::filesystem::path const& path) -> std::string;

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(std::filesystem::path const& path, std::string_view bytes);
/// Writes the concatenation of `parts` without joining them in memory.
void write_file_atomic(std::filesystem::path const& path, std::initializer_list<std::string_view> parts);

}  // namespace girit::io
