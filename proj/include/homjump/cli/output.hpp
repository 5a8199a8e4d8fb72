#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace homjump::cli {

/// Shortest decimal that round-trips to the same double; '.' separator.
std::string format_double(double v);

/// Newline-terminated comma-separated rows built in memory.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::initializer_list<std::string_view> header);

  CsvBuilder& cell(double v);
  CsvBuilder& cell(std::uint64_t v);
  CsvBuilder& end_row();

  const std::string& str() const { return text_; }

 private:
  void separator();

  std::string text_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

/// Writes via a temporary sibling file and rename, then reads the file back and
/// checks it matches. Throws std::runtime_error on any failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

}  // namespace homjump::cli
