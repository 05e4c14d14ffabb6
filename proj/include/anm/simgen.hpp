#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "anm/dataset.hpp"
#include "anm/graph.hpp"

namespace anm {

inline constexpr std::size_t kEdgeGridPoints = 1000;

/// Univariate function given by ordinates on the 1000-point grid over [-1, 1],
/// interpolated by a natural cubic spline inside and continued as an affine
/// function (matching value and slope at the boundary) outside.
class EdgeFunction {
 public:
  /// f(x) = x exactly.
  static EdgeFunction identity();
  /// Ordinates on grid(); throws Error{shape_mismatch} unless 1000 finite values.
  static EdgeFunction from_ordinates(std::vector<double> ordinates);

  static const std::vector<double>& grid();

  double operator()(double x) const;
  std::vector<double> evaluate(std::span<const double> xs) const;

  const std::vector<double>& ordinates() const noexcept { return ordinates_; }
  const std::vector<double>& second_derivatives() const noexcept { return curvature_; }
  double left_slope() const noexcept { return left_slope_; }
  double right_slope() const noexcept { return right_slope_; }
  double left_value() const noexcept { return ordinates_.front(); }
  double right_value() const noexcept { return ordinates_.back(); }
  bool is_identity() const noexcept { return identity_; }
  /// Nonlinearity measured when the function was built.
  double nonlinearity() const noexcept { return nonlinearity_; }

 private:
  std::vector<double> ordinates_;
  std::vector<double> curvature_;  // spline second derivatives at the grid points
  double left_slope_ = 1.0;
  double right_slope_ = 1.0;
  double nonlinearity_ = 0.0;
  bool identity_ = false;
};

/// Normalised L2 distance from the best affine approximation on a 1001-point
/// grid over [-1, 1]: rms(f - (a x + b)) / rms(f - mean f), 0 for a flat f.
double nonlinearity(const std::function<double(double)>& f);
double nonlinearity(const EdgeFunction& f);

/// sgn(nu) * |nu|^q elementwise. Requires 0.5 <= q <= 2.
std::vector<double> transform_noise(std::span<const double> nu, double q);

/// X1 = e1, X2 = X1 + b X1^3 + e2 with power-transformed standard normal noise.
Dataset gen_cubic(std::size_t n, double b, double q, std::uint64_t seed);

/// Smoothed, range-normalised Wiener path blended with the identity so that its
/// nonlinearity is target_nl within tol. Throws Error{target_unreachable} when
/// 50 sampled paths all fall short of the target.
EdgeFunction gen_wiener_function(std::uint64_t seed, double target_nl, double tol = 1e-3);

struct NoiseSpec {
  enum class Kind { gaussian, power };
  Kind kind = Kind::gaussian;
  double value = 1.0;  // sigma for gaussian, exponent q for power

  static NoiseSpec gaussian(double sigma) { return {Kind::gaussian, sigma}; }
  static NoiseSpec power(double q) { return {Kind::power, q}; }
};

/// Additive noise model over a DAG: node k = sum over its parents p (ascending)
/// of functions[k][i](X_p) + noise_k.
struct AnmSpec {
  Dag dag;
  std::vector<std::vector<EdgeFunction>> functions;
  std::vector<NoiseSpec> noise;

  /// Throws Error{invalid_argument} when counts or noise parameters are off.
  void validate() const;
};

/// Random Wiener edge functions on every edge of `dag`, each with nonlinearity
/// drawn uniformly from [nl_lo, nl_hi]; same noise on every node.
AnmSpec random_anm_spec(const Dag& dag, double nl_lo, double nl_hi, NoiseSpec noise, std::uint64_t seed);

Dataset sample_anm(const AnmSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace anm
