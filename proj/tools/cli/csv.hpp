#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace riskavi::cli {

/// Comma-separated table with a fixed header. Doubles use the shortest text
/// that round-trips, so equal values always print identically.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
  CsvWriter& operator<<(std::size_t v);
  CsvWriter& operator<<(bool v) { return *this << static_cast<long>(v ? 1 : 0); }
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  /// Terminate the current row. Throws if the cell count is wrong.
  void end_row();
  void close();

 private:
  void cell(const std::string& text);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace riskavi::cli
