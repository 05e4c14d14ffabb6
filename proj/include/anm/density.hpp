#pragma once

#include <span>
#include <vector>

namespace anm {

enum class DensityKind { kde, kde_loo };

struct BandwidthRule {
  enum class Kind { silverman, fixed };
  Kind kind = Kind::silverman;
  double h = 0.0;  // used when kind == fixed; must be > 0

  static BandwidthRule silverman() { return {}; }
  static BandwidthRule fixed(double h) { return {Kind::fixed, h}; }
  friend bool operator==(const BandwidthRule&, const BandwidthRule&) = default;
};

struct DensityConfig {
  DensityKind kind = DensityKind::kde;
  BandwidthRule bandwidth;
  friend bool operator==(const DensityConfig&, const DensityConfig&) = default;
};

/// log(1e-300): floor applied to every log-density value.
inline constexpr double kLogDensityFloor = -690.77552789821368;

/// 1e-9 * max(sample SD, 1).
double bandwidth_floor(std::span<const double> samples);

/// 0.9 * min(SD, IQR/1.34) * n^(-1/5), falling back to SD when the IQR is zero,
/// floored at bandwidth_floor. Throws Error{too_few_points} for n < 2.
double silverman_bandwidth(std::span<const double> samples);

/// Equal-weight Gaussian kernel mixture over a sample.
class DensityModel {
 public:
  DensityModel(std::vector<double> samples, double h, DensityKind kind);

  double bandwidth() const noexcept { return h_; }
  DensityKind kind() const noexcept { return kind_; }
  const std::vector<double>& samples() const noexcept { return sorted_; }

  /// Pointwise log-density in log-sum-exp form, floored at kLogDensityFloor.
  /// With kind == kde_loo and training set, each point drops one kernel centred
  /// on an equal sample value (the point's own kernel). OpenMP over points.
  std::vector<double> log_density(std::span<const double> points, bool training = false) const;
  /// O(n) per point serial reference; bitwise-identical to log_density().
  std::vector<double> log_density_serial(std::span<const double> points, bool training = false) const;

  double density(double x) const;

 private:
  double log_density_at(double x, bool leave_one_out) const;
  double log_density_at_serial(double x, bool leave_one_out) const;

  std::vector<double> sorted_;
  double h_;
  DensityKind kind_;
};

/// Throws Error{too_few_points} for n < 2, Error{invalid_argument} for a
/// non-positive fixed bandwidth.
DensityModel fit_density(std::span<const double> samples, const DensityConfig& config);

}  // namespace anm
