#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace snvc {

std::string read_text_file(const std::string& path);
std::vector<std::byte> read_binary_file(const std::string& path);

/// Write via a sibling temp file and rename, so readers never observe a
/// partial file.
void write_text_file_atomic(const std::string& path, const std::string& text);
void write_binary_file_atomic(const std::string& path,
                              std::span<const std::byte> bytes);

}  // namespace snvc
