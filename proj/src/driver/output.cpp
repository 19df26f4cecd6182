#include "umcmc/driver/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace umcmc::driver {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, 16);
  std::string digits(buf, res.ptr);
  return std::string(16 - digits.size(), '0') + digits;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_escape(header[i]);
  }
  text_ += '\n';
}

void CsvTable::finish_row() {
  if (!open_) return;
  if (filled_ != columns_) throw std::logic_error("CsvTable: row has the wrong number of cells");
  text_ += '\n';
  open_ = false;
}

CsvTable& CsvTable::row() {
  finish_row();
  open_ = true;
  filled_ = 0;
  return *this;
}

CsvTable& CsvTable::cell(std::string_view text) {
  if (!open_) throw std::logic_error("CsvTable: cell outside a row");
  if (filled_ == columns_) throw std::logic_error("CsvTable: too many cells");
  if (filled_) text_ += ',';
  text_ += csv_escape(text);
  ++filled_;
  return *this;
}

CsvTable& CsvTable::cell(double value) { return cell(std::string_view(format_double(value))); }
CsvTable& CsvTable::cell(std::int64_t value) { return cell(std::string_view(std::to_string(value))); }
CsvTable& CsvTable::cell(std::uint64_t value) { return cell(std::string_view(std::to_string(value))); }
CsvTable& CsvTable::empty() { return cell(std::string_view()); }

const std::string& CsvTable::text() {
  finish_row();
  return text_;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace umcmc::driver
