#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace wsa {

/// Locale-independent shortest-ish rendering ("%.12g").
std::string format_number(double x);

/// In-memory CSV with a header row. Cells are stored already formatted so
/// the bytes written are fully determined by the values added.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& add(double x);
  CsvTable& add(long long x);
  CsvTable& add(int x) { return add(static_cast<long long>(x)); }
  CsvTable& add(bool x) { return add(static_cast<long long>(x ? 1 : 0)); }
  CsvTable& add(const std::string& s);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& cells(std::size_t i) const { return rows_.at(i); }

  /// Throws std::logic_error when a row has the wrong number of cells.
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a simple CSV (no embedded newlines). Blank lines and lines starting
/// with '#' are skipped. Throws std::runtime_error with file and line context.
CsvDocument read_csv(const std::filesystem::path& path);

/// Strict double parse of a whole cell.
double parse_number(const std::string& cell);

}  // namespace wsa
