#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "avloc/errors.hpp"

namespace avloc {

// Little-endian scalar packing. Written byte by byte so the on-disk layout is
// independent of the host byte order.

inline void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

/// Sequential reader over an in-memory buffer that reports the byte offset of
/// any truncation.
class ByteReader {
 public:
  ByteReader(const std::string& data, std::string source)
      : data_(data), source_(std::move(source)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void read_magic(const char* magic, std::size_t n) {
    need(n, "magic");
    if (std::memcmp(data_.data() + pos_, magic, n) != 0) {
      throw FormatError(source_ + ": bad magic (expected \"" + std::string(magic, n) + "\")", 0);
    }
    pos_ += n;
  }

  std::uint32_t read_u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t read_u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  float read_f32(const char* what) { return std::bit_cast<float>(read_u32(what)); }
  double read_f64(const char* what) { return std::bit_cast<double>(read_u64(what)); }

  void expect_end() {
    if (pos_ != data_.size()) {
      throw FormatError(source_ + ": trailing bytes after payload", pos_);
    }
  }

 private:
  void need(std::size_t n, const char* what) {
    if (pos_ + n > data_.size()) {
      throw FormatError(source_ + ": truncated while reading " + what, pos_);
    }
  }

  const std::string& data_;
  std::string source_;
  std::size_t pos_ = 0;
};

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw FormatError("I/O error reading " + path.string());
  return data;
}

/// Writes bytes to a temporary file in the destination directory and renames
/// it into place, so readers never observe a partially written file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw FormatError("I/O error writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace avloc
