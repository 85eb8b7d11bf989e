#pragma once
// Little-endian byte packing shared by the dataset and model formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>

#include "gated/dataset.hpp"

namespace gated::detail {

class ByteWriter {
 public:
  void bytes(std::string_view raw) { out_.append(raw); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> values) {
    for (double v : values) f64(v);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string_view format) : data_(data), format_(format) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  std::string_view bytes(std::size_t n, std::string_view what) {
    need(n, what);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8(std::string_view what) {
    need(1, what);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32(std::string_view what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(std::string_view what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(std::string_view what) { return std::bit_cast<double>(u64(what)); }
  void f64s(std::span<double> out, std::string_view what) {
    need(8 * out.size(), what);
    for (double& v : out) v = f64(what);
  }
  std::string str(std::string_view what) {
    const std::uint32_t n = u32(what);
    return std::string(bytes(n, what));
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(std::string(format_) + ": " + message + " (at byte offset " +
                      std::to_string(pos_) + ")");
  }

 private:
  void need(std::size_t n, std::string_view what) const {
    if (data_.size() - pos_ < n) {
      fail("truncated while reading " + std::string(what) + ": need " + std::to_string(n) +
           " bytes, " + std::to_string(data_.size() - pos_) + " remain");
    }
  }

  std::string_view data_;
  std::string_view format_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace gated::detail
