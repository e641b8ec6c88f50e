#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace eulerfe::app {

/// CSV file with a leading `# config_hash=...` comment and a header row.
/// Numbers are written with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash, const std::vector<std::string>& columns);

  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(int v);
  /// Ends the current row; throws if the column count does not match.
  void end_row();
  void flush() { out_.flush(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  size_t columns_;
  size_t in_row_ = 0;
};

/// Writes an N x N grid (row j holds values[i + N * j]).
void write_grid_csv(const std::filesystem::path& path, const std::string& config_hash, int n,
                    const std::vector<double>& values);

}  // namespace eulerfe::app
