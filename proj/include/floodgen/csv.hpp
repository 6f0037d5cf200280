#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace floodgen {

// Minimal CSV support for the pipeline's numeric files. No quoting; fields
// never contain commas.
class CsvTable {
public:
  static CsvTable parse(const std::string& text, const std::string& origin);
  static CsvTable load(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  // Column index by header name; fails with BadData when absent and
  // required, returns -1 otherwise.
  int column(const std::string& name, bool required = true) const;

  const std::string& cell(std::size_t row, int col) const {
    return rows_[row][static_cast<std::size_t>(col)];
  }
  double number(std::size_t row, int col) const;
  long long integer(std::size_t row, int col) const;

private:
  std::string origin_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

double parse_double(std::string_view s, const std::string& context);
long long parse_int(std::string_view s, const std::string& context);

}  // namespace floodgen
