#include "anm/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "anm/error.hpp"
#include "anm/parallel.hpp"

namespace anm {

namespace {

constexpr int kSmoothingKnots = 6;
constexpr int kMaxPathAttempts = 50;

void check_q(double q) {
  if (!(q >= 0.5 && q <= 2.0)) throw Error(ErrorCode::invalid_argument, "noise exponent q must lie in [0.5, 2]");
}

std::vector<double> standard_normals(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

// Least-squares natural cubic regression spline with boundary knots at -1 and 1
// and evenly spaced interior knots, evaluated back on the grid. The fit has zero
// curvature at both ends, so the linear continuation outside [-1, 1] is smooth.
std::vector<double> smooth_path(const std::vector<double>& path) {
  const auto& x = EdgeFunction::grid();
  constexpr int knots = kSmoothingKnots + 2;
  std::array<double, knots> xi{};
  for (int k = 0; k < knots; ++k) xi[k] = -1.0 + 2.0 * k / (knots - 1.0);
  auto d = [&](int k, double v) {
    const double a = std::max(0.0, v - xi[k]), b = std::max(0.0, v - xi[knots - 1]);
    return (a * a * a - b * b * b) / (xi[knots - 1] - xi[k]);
  };
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(x.size()), knots);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    basis(r, 0) = 1.0;
    basis(r, 1) = x[i];
    for (int k = 0; k < knots - 2; ++k) basis(r, 2 + k) = d(k, x[i]) - d(knots - 2, x[i]);
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(path.data(), static_cast<Eigen::Index>(path.size()));
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd fitted = basis * coef;
  return {fitted.data(), fitted.data() + fitted.size()};
}

std::vector<double> wiener_path(Rng& rng) {
  const double step_sd = std::sqrt(2.0 / static_cast<double>(kEdgeGridPoints - 1));
  std::normal_distribution<double> normal(0.0, step_sd);
  std::vector<double> w(kEdgeGridPoints);
  double acc = 0.0;
  for (auto& v : w) {
    acc += normal(rng);
    v = acc;
  }
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  const double low = *lo;
  const double range = *hi - *lo;
  for (auto& v : w) v = 2.0 * (v - low) / range - 1.0;
  return w;
}

EdgeFunction blend(const std::vector<double>& base, double lambda) {
  const auto& x = EdgeFunction::grid();
  std::vector<double> y(base.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (1.0 - lambda) * x[i] + lambda * base[i];
  // Blending shrinks the ordinate range; restore length 2 (the identity is unchanged).
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double factor = 2.0 / (*hi - *lo);
  for (auto& v : y) v *= factor;
  return EdgeFunction::from_ordinates(std::move(y));
}

}  // namespace

std::vector<double> transform_noise(std::span<const double> nu, double q) {
  check_q(q);
  std::vector<double> out(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) out[i] = std::copysign(std::pow(std::abs(nu[i]), q), nu[i]);
  return out;
}

Dataset gen_cubic(std::size_t n, double b, double q, std::uint64_t seed) {
  if (n < 10) throw Error(ErrorCode::too_few_points, "cubic generator needs n >= 10");
  if (!(b >= -1.0 && b <= 1.0)) throw Error(ErrorCode::invalid_argument, "b must lie in [-1, 1]");
  check_q(q);
  Rng rng(seed);
  const std::vector<double> e1 = transform_noise(standard_normals(rng, n), q);
  const std::vector<double> e2 = transform_noise(standard_normals(rng, n), q);
  std::vector<double> x2(n);
  for (std::size_t j = 0; j < n; ++j) x2[j] = e1[j] + b * e1[j] * e1[j] * e1[j] + e2[j];
  std::ostringstream tag;
  tag << "cubic(b=" << b << ",q=" << q << ",seed=" << seed << ")";
  return Dataset::from_columns({e1, x2}, {"X1", "X2"}, tag.str());
}

EdgeFunction gen_wiener_function(std::uint64_t seed, double target_nl, double tol) {
  if (!(target_nl >= 0.0)) throw Error(ErrorCode::invalid_argument, "target nonlinearity must be >= 0");
  if (target_nl == 0.0) return EdgeFunction::identity();
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxPathAttempts; ++attempt) {
    const std::vector<double> base = smooth_path(wiener_path(rng));
    EdgeFunction full = blend(base, 1.0);
    if (full.nonlinearity() < target_nl - tol) continue;
    if (std::abs(full.nonlinearity() - target_nl) <= tol) return full;
    // nonlinearity(blend(0)) = 0 < target <= nonlinearity(blend(1)): bisect the bracket.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      EdgeFunction f = blend(base, mid);
      const double nl = f.nonlinearity();
      if (std::abs(nl - target_nl) <= tol) return f;
      (nl < target_nl ? lo : hi) = mid;
    }
  }
  throw Error(ErrorCode::target_unreachable, "no sampled path reached nonlinearity " + std::to_string(target_nl));
}

void AnmSpec::validate() const {
  const auto d = static_cast<std::size_t>(dag.size());
  if (functions.size() != d || noise.size() != d)
    throw Error(ErrorCode::invalid_argument, "need one function list and one noise spec per node");
  for (int k = 0; k < dag.size(); ++k) {
    if (functions[static_cast<std::size_t>(k)].size() != dag.parents(k).size())
      throw Error(ErrorCode::invalid_argument, "node X" + std::to_string(k + 1) + ": function count != parent count");
    const NoiseSpec& ns = noise[static_cast<std::size_t>(k)];
    if (ns.kind == NoiseSpec::Kind::gaussian && !(ns.value > 0.0))
      throw Error(ErrorCode::invalid_argument, "gaussian noise needs sigma > 0");
    if (ns.kind == NoiseSpec::Kind::power) check_q(ns.value);
  }
}

AnmSpec random_anm_spec(const Dag& dag, double nl_lo, double nl_hi, NoiseSpec noise, std::uint64_t seed) {
  if (!(nl_lo >= 0.0 && nl_hi >= nl_lo)) throw Error(ErrorCode::invalid_argument, "invalid nonlinearity range");
  AnmSpec spec{dag, {}, std::vector<NoiseSpec>(static_cast<std::size_t>(dag.size()), noise)};
  Rng rng(seed);
  std::uniform_real_distribution<double> level(nl_lo, nl_hi);
  for (int k = 0; k < dag.size(); ++k) {
    std::vector<EdgeFunction> fs;
    for (int p : dag.parents(k)) {
      const double target = nl_lo == nl_hi ? nl_lo : level(rng);
      fs.push_back(gen_wiener_function(derive_seed(seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(p)}),
                                       target));
    }
    spec.functions.push_back(std::move(fs));
  }
  return spec;
}

Dataset sample_anm(const AnmSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw Error(ErrorCode::too_few_points, "sample size must be >= 1");
  const auto d = static_cast<std::size_t>(spec.dag.size());
  std::vector<std::vector<double>> columns(d);
  Rng rng(seed);
  for (int k : spec.dag.topological_order()) {
    const NoiseSpec& ns = spec.noise[static_cast<std::size_t>(k)];
    std::vector<double> nu = standard_normals(rng, n);
    std::vector<double> value = ns.kind == NoiseSpec::Kind::power ? transform_noise(nu, ns.value) : nu;
    if (ns.kind == NoiseSpec::Kind::gaussian)
      for (auto& v : value) v *= ns.value;
    const std::vector<int> parents = spec.dag.parents(k);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const EdgeFunction& f = spec.functions[static_cast<std::size_t>(k)][i];
      const auto& xp = columns[static_cast<std::size_t>(parents[i])];
      for (std::size_t j = 0; j < n; ++j) value[j] += f(xp[j]);
    }
    columns[static_cast<std::size_t>(k)] = std::move(value);
  }
  std::ostringstream tag;
  tag << "anm(dag=" << spec.dag.to_string() << ",seed=" << seed << ")";
  return Dataset::from_columns(columns, {}, tag.str());
}

}  // namespace anm
