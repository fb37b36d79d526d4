#pragma once

#include <string>

namespace sypi {

/// Writes `contents` to a temporary sibling file and renames it over `path`.
/// Missing parent directories are created.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace sypi
