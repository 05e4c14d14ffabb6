#include <cmath>
#include <string>

#include "anm/error.hpp"
#include "anm/simgen.hpp"

namespace anm {

namespace {

double grid_step() { return 2.0 / static_cast<double>(kEdgeGridPoints - 1); }

// Natural cubic spline second derivatives on the uniform grid (Thomas algorithm).
std::vector<double> natural_curvature(const std::vector<double>& y) {
  const std::size_t n = y.size();
  const double h = grid_step();
  std::vector<double> m(n, 0.0);
  const std::size_t inner = n - 2;
  std::vector<double> c(inner), r(inner);
  for (std::size_t i = 0; i < inner; ++i) r[i] = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
  // Diagonal 4, off-diagonals 1.
  double denom = 4.0;
  c[0] = 1.0 / denom;
  r[0] /= denom;
  for (std::size_t i = 1; i < inner; ++i) {
    denom = 4.0 - c[i - 1];
    c[i] = 1.0 / denom;
    r[i] = (r[i] - r[i - 1]) / denom;
  }
  m[inner] = r[inner - 1];
  for (std::size_t i = inner - 1; i-- > 0;) r[i] -= c[i] * r[i + 1];
  for (std::size_t i = 0; i < inner; ++i) m[i + 1] = r[i];
  return m;
}

}  // namespace

const std::vector<double>& EdgeFunction::grid() {
  static const std::vector<double> g = [] {
    std::vector<double> x(kEdgeGridPoints);
    for (std::size_t i = 0; i < kEdgeGridPoints; ++i)
      x[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(kEdgeGridPoints - 1);
    return x;
  }();
  return g;
}

EdgeFunction EdgeFunction::identity() {
  EdgeFunction f;
  f.ordinates_ = grid();
  f.curvature_.assign(kEdgeGridPoints, 0.0);
  f.left_slope_ = f.right_slope_ = 1.0;
  f.identity_ = true;
  f.nonlinearity_ = 0.0;
  return f;
}

EdgeFunction EdgeFunction::from_ordinates(std::vector<double> ordinates) {
  if (ordinates.size() != kEdgeGridPoints)
    throw Error(ErrorCode::shape_mismatch, "edge function needs " + std::to_string(kEdgeGridPoints) + " ordinates");
  for (double v : ordinates)
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "edge function ordinates must be finite");
  EdgeFunction f;
  f.ordinates_ = std::move(ordinates);
  f.curvature_ = natural_curvature(f.ordinates_);
  const double h = grid_step();
  const auto& y = f.ordinates_;
  const auto& m = f.curvature_;
  const std::size_t last = kEdgeGridPoints - 1;
  f.left_slope_ = (y[1] - y[0]) / h - h * (2.0 * m[0] + m[1]) / 6.0;
  f.right_slope_ = (y[last] - y[last - 1]) / h + h * (m[last - 1] + 2.0 * m[last]) / 6.0;
  f.nonlinearity_ = anm::nonlinearity(f);
  return f;
}

double EdgeFunction::operator()(double x) const {
  if (identity_) return x;
  if (x <= -1.0) return ordinates_.front() + left_slope_ * (x + 1.0);
  if (x >= 1.0) return ordinates_.back() + right_slope_ * (x - 1.0);
  const auto& g = grid();
  const double h = grid_step();
  auto i = static_cast<std::size_t>(std::floor((x + 1.0) / h));
  if (i > kEdgeGridPoints - 2) i = kEdgeGridPoints - 2;
  if (x < g[i] && i > 0) --i;
  const double a = (g[i + 1] - x) / h;
  const double b = (x - g[i]) / h;
  return a * ordinates_[i] + b * ordinates_[i + 1] +
         ((a * a * a - a) * curvature_[i] + (b * b * b - b) * curvature_[i + 1]) * h * h / 6.0;
}

std::vector<double> EdgeFunction::evaluate(std::span<const double> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((*this)(x));
  return out;
}

double nonlinearity(const std::function<double(double)>& f) {
  constexpr int kPoints = 1001;
  std::vector<double> t(kPoints), v(kPoints);
  double tm = 0.0, vm = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    t[i] = -1.0 + 2.0 * i / (kPoints - 1.0);
    v[i] = f(t[i]);
    tm += t[i];
    vm += v[i];
  }
  tm /= kPoints;
  vm /= kPoints;
  double stt = 0.0, stv = 0.0, svv = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    stv += (t[i] - tm) * (v[i] - vm);
    svv += (v[i] - vm) * (v[i] - vm);
  }
  const double denom = std::sqrt(svv / kPoints);
  if (denom < 1e-12) return 0.0;
  const double slope = stv / stt;
  const double intercept = vm - slope * tm;
  double sse = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double r = v[i] - (slope * t[i] + intercept);
    sse += r * r;
  }
  return std::sqrt(sse / kPoints) / denom;
}

double nonlinearity(const EdgeFunction& f) {
  if (f.is_identity()) return 0.0;
  return nonlinearity([&f](double x) { return f(x); });
}

}  // namespace anm
