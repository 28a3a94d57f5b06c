#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "lqglab/common.hpp"

namespace lqglab {

/// Thin RAII wrappers over stdio with little-endian scalar helpers.
/// All on-disk integers are little-endian regardless of host order.
class FileWriter {
 public:
  explicit FileWriter(const std::string& path) : f_(std::fopen(path.c_str(), "wb")) {
    if (!f_) fail(ErrorCode::io, "cannot open for writing: " + path);
  }
  ~FileWriter() {
    if (f_) std::fclose(f_);
  }
  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  void write_bytes(const char* p, std::size_t count) {
    if (std::fwrite(p, 1, count, f_) != count) fail(ErrorCode::io, "short write");
  }
  void write_u32(std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    write_bytes(b, 4);
  }
  void write_f64(double v) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(v));
    __builtin_memcpy(&u, &v, 8);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(u >> (8 * i));
    write_bytes(b, 8);
  }

 private:
  std::FILE* f_;
};

class FileReader {
 public:
  explicit FileReader(const std::string& path) : f_(std::fopen(path.c_str(), "rb")) {
    if (!f_) fail(ErrorCode::io, "cannot open for reading: " + path);
  }
  ~FileReader() {
    if (f_) std::fclose(f_);
  }
  FileReader(const FileReader&) = delete;
  FileReader& operator=(const FileReader&) = delete;

  void read_bytes(char* p, std::size_t count) {
    if (std::fread(p, 1, count, f_) != count) fail(ErrorCode::io, "short read");
  }
  std::uint32_t read_u32() {
    unsigned char b[4];
    read_bytes(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  double read_f64() {
    unsigned char b[8];
    read_bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    __builtin_memcpy(&v, &u, 8);
    return v;
  }

 private:
  std::FILE* f_;
};

/// FNV-1a 64-bit digest of a file's bytes, as a 16-hex-digit string.  Used by
/// run manifests to certify byte-identical reruns.
std::string file_digest(const std::string& path);

/// Reads a whole file into a string (binary).
std::string read_file(const std::string& path);

}  // namespace lqglab
