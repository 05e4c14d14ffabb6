#include "anm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "anm/error.hpp"

namespace anm {

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> column_major,
                 std::vector<std::string> names, std::string provenance)
    : n_(n), d_(d), values_(std::move(column_major)), names_(std::move(names)), provenance_(std::move(provenance)) {
  if (values_.size() != n * d) throw Error(ErrorCode::shape_mismatch, "value count does not equal n*d");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "dataset values must be finite");
  if (names_.empty()) {
    for (std::size_t k = 0; k < d; ++k) names_.push_back("X" + std::to_string(k + 1));
  }
  if (names_.size() != d) throw Error(ErrorCode::shape_mismatch, "column name count does not equal d");
}

Dataset Dataset::from_columns(const std::vector<std::vector<double>>& columns, std::vector<std::string> names,
                              std::string provenance) {
  const std::size_t d = columns.size();
  const std::size_t n = d == 0 ? 0 : columns.front().size();
  std::vector<double> values;
  values.reserve(n * d);
  for (const auto& c : columns) {
    if (c.size() != n) throw Error(ErrorCode::shape_mismatch, "columns differ in length");
    values.insert(values.end(), c.begin(), c.end());
  }
  return Dataset(n, d, std::move(values), std::move(names), std::move(provenance));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows, std::string provenance) const {
  std::vector<double> values;
  values.reserve(rows.size() * d_);
  for (std::size_t k = 0; k < d_; ++k)
    for (std::size_t r : rows) values.push_back((*this)(r, k));
  return Dataset(rows.size(), d_, std::move(values), names_, std::move(provenance));
}

Dataset Dataset::select_columns(std::span<const std::size_t> cols) const {
  std::vector<double> values;
  std::vector<std::string> names;
  for (std::size_t k : cols) {
    if (k >= d_) throw Error(ErrorCode::shape_mismatch, "column index out of range");
    const auto c = column(k);
    values.insert(values.end(), c.begin(), c.end());
    names.push_back(names_[k]);
  }
  return Dataset(n_, cols.size(), std::move(values), std::move(names), provenance_);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t k = 0; k < data.cols(); ++k) {
    if (k) out += ',';
    out += data.names()[k];
  }
  out += '\n';
  char buf[64];
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t k = 0; k < data.cols(); ++k) {
      if (k) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", data(r, k));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
  os << to_csv(data);
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == ';') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool parse_number(const std::string& token, double& value) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Dataset load_dataset(const std::string& path, LoadStats* stats) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_error, "cannot open " + path);
  LoadStats local;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_content = true;
  while (std::getline(is, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    std::vector<double> row(fields.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], row[i])) {
        numeric = false;
        bad = i;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      width = fields.size();
      if (!numeric) {
        names = fields;
        local.had_header = true;
        continue;
      }
    }
    if (!numeric) {
      throw Error(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) + ": non-numeric field '" + fields[bad] + "'");
    }
    if (row.size() != width) {
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(width) + " fields, got " + std::to_string(row.size()));
    }
    bool finite = true;
    for (double v : row) finite = finite && std::isfinite(v);
    if (!finite) {
      ++local.rejected_nonfinite;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::empty_file, path + " holds no numeric rows");
  local.rows_read = rows.size();

  std::vector<double> values(rows.size() * width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < width; ++k) values[k * rows.size() + r] = rows[r][k];
  std::string provenance = "file:" + path;
  if (local.rejected_nonfinite) provenance += " (" + std::to_string(local.rejected_nonfinite) + " non-finite rows rejected)";
  if (stats) *stats = local;
  return Dataset(rows.size(), width, std::move(values), std::move(names), std::move(provenance));
}

}  // namespace anm
