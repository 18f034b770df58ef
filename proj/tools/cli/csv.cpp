#include "cli/csv.hpp"

#include <stdexcept>

#include "cli/run_config.hpp"

namespace riskavi::cli {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::cell(const std::string& text) {
  if (in_row_ == columns_) throw std::logic_error(path_.string() + ": too many cells in row");
  if (in_row_ > 0) out_ << ',';
  out_ << text;
  ++in_row_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  cell(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long v) {
  cell(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t v) {
  cell(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  if (v.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : v) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    cell(quoted + "\"");
  } else {
    cell(v);
  }
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error(path_.string() + ": row has " + std::to_string(in_row_) + " cells, expected " +
                           std::to_string(columns_));
  }
  out_ << '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("failed writing " + path_.string());
}

}  // namespace riskavi::cli
