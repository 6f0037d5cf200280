#include "floodgen/csv.hpp"

#include <charconv>
#include <cstdlib>

#include "floodgen/common.hpp"

namespace floodgen {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_double(std::string_view s, const std::string& context) {
  s = trim(s);
  if (s.empty()) fail(errc::bad_data, "empty numeric field in " + context);
  // std::from_chars<double> handles plain decimals but not hexfloats from
  // older writers; strtod covers both.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size())
    fail(errc::bad_data, "bad number '" + tmp + "' in " + context);
  return v;
}

long long parse_int(std::string_view s, const std::string& context) {
  s = trim(s);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    fail(errc::bad_data, "bad integer '" + std::string(s) + "' in " + context);
  return v;
}

CsvTable CsvTable::parse(const std::string& text, const std::string& origin) {
  CsvTable t;
  t.origin_ = origin;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    line = trim(line);
    pos = nl + 1;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    for (auto& f : fields) f = std::string(trim(f));
    if (first) {
      t.header_ = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header_.size())
        fail(errc::bad_data, "ragged row in " + origin);
      t.rows_.push_back(std::move(fields));
    }
  }
  if (first) fail(errc::bad_data, "empty CSV " + origin);
  return t;
}

CsvTable CsvTable::load(const std::string& path) {
  return parse(read_file(path), path);
}

int CsvTable::column(const std::string& name, bool required) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return static_cast<int>(i);
  if (required) fail(errc::bad_data, "missing column '" + name + "' in " + origin_);
  return -1;
}

double CsvTable::number(std::size_t row, int col) const {
  return parse_double(rows_[row][static_cast<std::size_t>(col)],
                      origin_ + " row " + std::to_string(row + 2));
}

long long CsvTable::integer(std::size_t row, int col) const {
  return parse_int(rows_[row][static_cast<std::size_t>(col)],
                   origin_ + " row " + std::to_string(row + 2));
}

}  // namespace floodgen
