#include "csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace eulerfe::app {

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
  out_ << "# config_hash=" << config_hash << "\n";
  for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::separator() {
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << number(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(int v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("CsvWriter: row has " + std::to_string(in_row_) + " fields, expected " +
                           std::to_string(columns_));
  }
  out_ << "\n";
  in_row_ = 0;
}

void write_grid_csv(const std::filesystem::path& path, const std::string& config_hash, int n,
                    const std::vector<double>& values) {
  std::vector<std::string> cols;
  for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i));
  CsvWriter w(path, config_hash, cols);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) w << values[static_cast<size_t>(i) + static_cast<size_t>(n) * j];
    w.end_row();
  }
}

}  // namespace eulerfe::app
