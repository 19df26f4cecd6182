#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace umcmc::driver {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

std::string hex64(std::uint64_t value);

std::uint64_t fnv1a64(std::string_view bytes);

/// In-memory CSV document: header row, RFC 4180 quoting, CRLF-free.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& cell(std::string_view text);
  CsvTable& cell(double value);
  CsvTable& cell(std::int64_t value);
  CsvTable& cell(std::uint64_t value);
  CsvTable& cell(int value) { return cell(static_cast<std::int64_t>(value)); }
  CsvTable& cell(bool value) { return cell(std::string_view(value ? "true" : "false")); }
  CsvTable& cell(const char* text) { return cell(std::string_view(text)); }
  CsvTable& cell(const std::string& text) { return cell(std::string_view(text)); }
  CsvTable& empty();

  const std::string& text();

 private:
  void finish_row();

  std::size_t columns_;
  std::size_t filled_ = 0;
  bool open_ = false;
  std::string text_;
};

std::string csv_escape(std::string_view field);

/// Writes to a temporary sibling and renames it over the destination.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace umcmc::driver
