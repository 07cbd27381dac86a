#include "snvc/io_util.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "snvc/errors.hpp"

namespace snvc {

namespace {

std::string temp_sibling(const std::string& path) {
  return path + ".tmp." + std::to_string(::getpid());
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

std::vector<std::byte> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw FormatError("cannot open file: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw FormatError("read failed: " + path);
  }
  return bytes;
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open file for writing: " + tmp);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_binary_file_atomic(const std::string& path,
                              std::span<const std::byte> bytes) {
  const std::string tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open file for writing: " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace snvc
