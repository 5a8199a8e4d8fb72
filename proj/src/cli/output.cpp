#include "homjump/cli/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <openssl/evp.h>

namespace homjump::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf.data(), res.ptr};
}

CsvBuilder::CsvBuilder(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  bool first = true;
  for (auto h : header) {
    if (!first) text_ += ',';
    text_ += h;
    first = false;
  }
  text_ += '\n';
}

void CsvBuilder::separator() {
  if (in_row_ == columns_) throw std::logic_error("CsvBuilder: too many cells in row");
  if (in_row_ > 0) text_ += ',';
  ++in_row_;
}

CsvBuilder& CsvBuilder::cell(double v) {
  separator();
  text_ += format_double(v);
  return *this;
}

CsvBuilder& CsvBuilder::cell(std::uint64_t v) {
  separator();
  text_ += std::to_string(v);
  return *this;
}

CsvBuilder& CsvBuilder::end_row() {
  if (in_row_ != columns_) throw std::logic_error("CsvBuilder: row has wrong number of cells");
  text_ += '\n';
  in_row_ = 0;
  return *this;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());

  std::ifstream in(path, std::ios::binary);
  const std::string back((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (back != content) throw std::runtime_error("validation failed for " + path.string());
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

}  // namespace homjump::cli
