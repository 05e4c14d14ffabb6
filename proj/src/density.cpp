#include "anm/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anm/error.hpp"

namespace anm {

namespace {

// Kernels further than dmin + kCutoff*h from a point contribute exp(-800) == 0.
constexpr double kCutoff = 40.0;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double sample_sd(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Linear-interpolation quantile on a sorted sample (type 7).
double quantile_sorted(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

void require_two(std::span<const double> samples) {
  if (samples.size() < 2)
    throw Error(ErrorCode::too_few_points, "density estimation needs n >= 2, got " + std::to_string(samples.size()));
}

}  // namespace

double bandwidth_floor(std::span<const double> samples) {
  const double sd = samples.size() >= 2 ? sample_sd(samples) : 0.0;
  return 1e-9 * std::max(sd, 1.0);
}

double silverman_bandwidth(std::span<const double> samples) {
  require_two(samples);
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double sd = sample_sd(samples);
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
  return std::max(h, 1e-9 * std::max(sd, 1.0));
}

DensityModel::DensityModel(std::vector<double> samples, double h, DensityKind kind)
    : sorted_(std::move(samples)), h_(h), kind_(kind) {
  std::sort(sorted_.begin(), sorted_.end());
}

DensityModel fit_density(std::span<const double> samples, const DensityConfig& config) {
  require_two(samples);
  double h = 0.0;
  if (config.bandwidth.kind == BandwidthRule::Kind::fixed) {
    if (!(config.bandwidth.h > 0.0)) throw Error(ErrorCode::invalid_argument, "fixed bandwidth must be > 0");
    h = std::max(config.bandwidth.h, bandwidth_floor(samples));
  } else {
    h = silverman_bandwidth(samples);
  }
  return DensityModel(std::vector<double>(samples.begin(), samples.end()), h, config.kind);
}

double DensityModel::log_density_at(double x, bool leave_one_out) const {
  const std::size_t n = sorted_.size();
  const auto pos = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
  std::size_t skip = n;
  if (leave_one_out && pos < n && sorted_[pos] == x) skip = pos;

  double dmin2 = INFINITY;
  for (std::size_t i = pos > 0 ? pos - 1 : 0; i < std::min(pos + 2, n); ++i) {
    if (i == skip) continue;
    const double d = x - sorted_[i];
    dmin2 = std::min(dmin2, d * d);
  }
  const double reach = std::sqrt(dmin2) + kCutoff * h_;
  const auto lo = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), x - reach) - sorted_.begin());
  const auto hi = static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x + reach) - sorted_.begin());

  const double inv2h2 = 0.5 / (h_ * h_);
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (i == skip) continue;
    const double d = x - sorted_[i];
    sum += std::exp((dmin2 - d * d) * inv2h2);
  }
  const double count = static_cast<double>(skip < n ? n - 1 : n);
  const double value = -dmin2 * inv2h2 + std::log(sum) - std::log(count * h_) - kLogSqrt2Pi;
  return std::max(value, kLogDensityFloor);
}

double DensityModel::log_density_at_serial(double x, bool leave_one_out) const {
  const std::size_t n = sorted_.size();
  std::size_t skip = n;
  if (leave_one_out) {
    for (std::size_t i = 0; i < n; ++i) {
      if (sorted_[i] == x) {
        skip = i;
        break;
      }
    }
  }
  double dmin2 = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    const double d = x - sorted_[i];
    dmin2 = std::min(dmin2, d * d);
  }
  const double inv2h2 = 0.5 / (h_ * h_);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    const double d = x - sorted_[i];
    sum += std::exp((dmin2 - d * d) * inv2h2);
  }
  const double count = static_cast<double>(skip < n ? n - 1 : n);
  const double value = -dmin2 * inv2h2 + std::log(sum) - std::log(count * h_) - kLogSqrt2Pi;
  return std::max(value, kLogDensityFloor);
}

std::vector<double> DensityModel::log_density(std::span<const double> points, bool training) const {
  const bool loo = training && kind_ == DensityKind::kde_loo;
  std::vector<double> out(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (count > 128)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = log_density_at(points[i], loo);
  return out;
}

std::vector<double> DensityModel::log_density_serial(std::span<const double> points, bool training) const {
  const bool loo = training && kind_ == DensityKind::kde_loo;
  std::vector<double> out;
  out.reserve(points.size());
  for (double x : points) out.push_back(log_density_at_serial(x, loo));
  return out;
}

double DensityModel::density(double x) const {
  const double lp = log_density_at(x, false);
  return lp <= kLogDensityFloor ? 0.0 : std::exp(lp);
}

}  // namespace anm
