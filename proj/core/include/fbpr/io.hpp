#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fbpr {

/// All lines of a text file, without terminators. Throws Error{IoError}.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Write via a temporary file in the same directory plus rename, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace fbpr
