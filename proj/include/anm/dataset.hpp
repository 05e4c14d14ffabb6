#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace anm {

/// n x d sample of finite reals, stored column-major so each variable is a
/// contiguous span.
class Dataset {
 public:
  Dataset() = default;
  /// Throws Error{invalid_argument} on non-finite values or inconsistent shape.
  Dataset(std::size_t n, std::size_t d, std::vector<double> column_major,
          std::vector<std::string> names = {}, std::string provenance = {});

  static Dataset from_columns(const std::vector<std::vector<double>>& columns,
                              std::vector<std::string> names = {}, std::string provenance = {});

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return d_; }
  std::span<const double> column(std::size_t k) const {
    return {values_.data() + k * n_, n_};
  }
  double operator()(std::size_t row, std::size_t col) const { return values_[col * n_ + row]; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& provenance() const noexcept { return provenance_; }

  /// Rows selected by index, in the given order; keeps names.
  Dataset select_rows(std::span<const std::size_t> rows, std::string provenance) const;
  Dataset select_columns(std::span<const std::size_t> cols) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
  std::vector<std::string> names_;
  std::string provenance_;
};

/// CSV with a header row of column names and %.17g numbers.
std::string to_csv(const Dataset& data);
void write_csv(const Dataset& data, const std::string& path);

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t rejected_nonfinite = 0;
  bool had_header = false;
};

/// Whitespace- or comma-separated numeric columns with an optional header row.
/// Rows holding NaN/Inf are dropped and counted. Throws Error{parse_error} with
/// the offending line, Error{empty_file}, or Error{io_error}.
Dataset load_dataset(const std::string& path, LoadStats* stats = nullptr);

}  // namespace anm
