#include "anm/smooth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "anm/error.hpp"

namespace anm {

namespace {

constexpr double kRidgeJitter = 1e-10;

double tricube(double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  const double t = 1.0 - a * a * a;
  return t * t * t;
}

// Solves the (degree+1)-dimensional SPD system by Cholesky. Falls back to a
// ridge-jittered system when a pivot collapses (tied or one-sided windows).
std::array<double, 3> solve_normal(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b,
                                   int m) {
  double max_diag = 0.0;
  for (int i = 0; i < m; ++i) max_diag = std::max(max_diag, a[i][i]);
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1)
      for (int i = 0; i < m; ++i) a[i][i] += kRidgeJitter * std::max(max_diag, 1e-300);
    std::array<std::array<double, 3>, 3> l{};
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = a[i][j];
        for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (i == j) {
          if (s <= 1e-13 * max_diag || s <= 0.0) {
            ok = false;
            break;
          }
          l[i][i] = std::sqrt(s);
        } else {
          l[i][j] = s / l[j][j];
        }
      }
    }
    if (!ok) continue;
    std::array<double, 3> z{};
    for (int i = 0; i < m; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= l[i][k] * z[k];
      z[i] = s / l[i][i];
    }
    std::array<double, 3> x{};
    for (int i = m - 1; i >= 0; --i) {
      double s = z[i];
      for (int k = i + 1; k < m; ++k) s -= l[k][i] * x[k];
      x[i] = s / l[i][i];
    }
    return x;
  }
  // Only reachable when every weight vanished; fall back to the weighted mean.
  return {b[0] / std::max(a[0][0], 1e-300), 0.0, 0.0};
}

// Weighted local polynomial fit at x0 over xs[lo, hi) with bandwidth delta.
LocalEstimate local_wls(std::span<const double> xs, std::span<const double> ys, std::size_t lo,
                        std::size_t hi, double x0, double delta, int degree) {
  if (!(delta > 0.0)) delta = 1.0;  // every neighbour sits on x0
  const int m = degree + 1;
  std::array<double, 5> s{};
  std::array<double, 3> t{};
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = (xs[i] - x0) / delta;
    const double w = tricube(u);
    if (w == 0.0) continue;
    double p = w;
    for (int k = 0; k <= 2 * degree; ++k) {
      s[k] += p;
      if (k < m) t[k] += p * ys[i];
      p *= u;
    }
  }
  std::array<std::array<double, 3>, 3> a{};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = s[i + j];
  const auto beta = solve_normal(a, t, m);
  return {beta[0], beta[1] / delta};
}

}  // namespace

LocalRegression::LocalRegression(std::span<const double> x, std::span<const double> y, double span,
                                 int degree) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  *this = LocalRegression(x, y, order, span, degree);
}

LocalRegression::LocalRegression(std::span<const double> x, std::span<const double> y,
                                 std::span<const std::size_t> order, double span, int degree)
    : degree_(degree) {
  if (x.size() != y.size() || order.size() != x.size())
    throw Error(ErrorCode::shape_mismatch, "x, y and order lengths differ");
  if (!(span > 0.0 && span <= 1.0)) throw Error(ErrorCode::invalid_argument, "span must lie in (0, 1]");
  if (degree < 1 || degree > 2) throw Error(ErrorCode::invalid_argument, "degree must be 1 or 2");
  xs_.resize(x.size());
  ys_.resize(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs_[i] = x[order[i]];
    ys_[i] = y[order[i]];
  }
  window_ = static_cast<std::size_t>(std::floor(span * static_cast<double>(x.size())));
  if (window_ < static_cast<std::size_t>(degree) + 2) {
    throw Error(ErrorCode::too_few_points,
                "span*n = " + std::to_string(window_) + " < degree+2 = " + std::to_string(degree + 2));
  }
}

LocalEstimate LocalRegression::fit_inside(double x0) const {
  const std::size_t n = xs_.size();
  std::size_t hi = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), x0) - xs_.begin());
  std::size_t lo = hi;
  while (hi - lo < window_) {
    if (lo == 0) {
      ++hi;
    } else if (hi == n) {
      --lo;
    } else if (x0 - xs_[lo - 1] <= xs_[hi] - x0) {
      --lo;
    } else {
      ++hi;
    }
  }
  const double delta = std::max(x0 - xs_[lo], xs_[hi - 1] - x0);
  return local_wls(xs_, ys_, lo, hi, x0, delta, degree_);
}

LocalEstimate LocalRegression::fit_at(double x0) const {
  if (x0 < xs_.front()) {
    const LocalEstimate edge = fit_inside(xs_.front());
    return {edge.value + edge.slope * (x0 - xs_.front()), edge.slope};
  }
  if (x0 > xs_.back()) {
    const LocalEstimate edge = fit_inside(xs_.back());
    return {edge.value + edge.slope * (x0 - xs_.back()), edge.slope};
  }
  return fit_inside(x0);
}

std::vector<double> LocalRegression::evaluate(std::span<const double> points) const {
  std::vector<double> out(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (count > 256)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = fit_at(points[i]).value;
  return out;
}

std::vector<double> LocalRegression::evaluate_serial(std::span<const double> points) const {
  // Brute-force neighbour search: the bandwidth is the window-th smallest
  // distance over the whole sample and every point enters the weighted sums.
  const std::size_t n = xs_.size();
  std::vector<double> dist(n);
  auto inside = [&](double x0) {
    for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(xs_[i] - x0);
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(window_ - 1), dist.end());
    return local_wls(xs_, ys_, 0, n, x0, dist[window_ - 1], degree_);
  };
  std::vector<double> out;
  out.reserve(points.size());
  for (double x0 : points) {
    const double anchor = std::clamp(x0, xs_.front(), xs_.back());
    const LocalEstimate e = inside(anchor);
    out.push_back(anchor == x0 ? e.value : e.value + e.slope * (x0 - anchor));
  }
  return out;
}

std::vector<double> FittedSmoother::predict(const std::vector<std::span<const double>>& columns) const {
  if (columns.size() != components_.size()) {
    throw Error(ErrorCode::shape_mismatch, "expected " + std::to_string(components_.size()) +
                                               " predictor columns, got " + std::to_string(columns.size()));
  }
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != n) throw Error(ErrorCode::shape_mismatch, "predictor columns differ in length");
  std::vector<double> out(n, intercept_);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const std::vector<double> raw = components_[c].smoother.evaluate(columns[c]);
    for (std::size_t j = 0; j < n; ++j) out[j] += raw[j] - components_[c].center;
  }
  return out;
}

namespace {

std::vector<std::size_t> sort_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return order;
}

std::size_t distinct_sorted(std::span<const double> x, std::span<const std::size_t> order) {
  std::size_t count = x.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (x[order[i]] != x[order[i - 1]]) ++count;
  return count;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void check_sample(std::size_t n, std::size_t y_size, std::size_t minimum) {
  if (n != y_size) throw Error(ErrorCode::shape_mismatch, "predictor and response lengths differ");
  if (n < minimum) {
    throw Error(ErrorCode::too_few_points,
                "need at least " + std::to_string(minimum) + " points, got " + std::to_string(n));
  }
}

}  // namespace

FittedSmoother fit_local_poly(std::span<const double> x, std::span<const double> y,
                              const SmootherConfig& config) {
  check_sample(x.size(), y.size(), 10);
  const auto order = sort_order(x);
  const std::size_t distinct = distinct_sorted(x, order);
  if (distinct < 2) throw Error(ErrorCode::degenerate_x, "all predictor values are identical");
  const int degree = std::min<int>(config.degree, std::max<int>(1, static_cast<int>(distinct) - 2));

  FittedSmoother fit;
  fit.config_ = config;
  fit.intercept_ = mean(y);
  LocalRegression smoother(x, y, order, config.span, degree);
  const std::vector<double> raw = smoother.evaluate(x);
  fit.components_.push_back({std::move(smoother), mean(raw)});
  std::vector<double> centered(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) centered[j] = raw[j] - fit.components_[0].center;
  fit.component_values_.push_back(std::move(centered));
  fit.fitted_ = fit.predict({x});
  fit.iterations_ = 1;
  return fit;
}

FittedSmoother fit_additive(const std::vector<std::span<const double>>& columns,
                            std::span<const double> y, const SmootherConfig& config) {
  const std::size_t p = columns.size();
  if (p == 0) throw Error(ErrorCode::invalid_argument, "additive fit needs at least one predictor");
  if (p == 1) return fit_local_poly(columns[0], y, config);
  const std::size_t n = y.size();
  for (const auto& c : columns) check_sample(c.size(), n, 10 * p);

  std::vector<std::vector<std::size_t>> orders;
  for (const auto& c : columns) {
    orders.push_back(sort_order(c));
    if (distinct_sorted(c, orders.back()) < 2)
      throw Error(ErrorCode::degenerate_x, "a predictor column is constant");
  }

  FittedSmoother fit;
  fit.config_ = config;
  fit.intercept_ = mean(y);
  fit.components_.resize(p);
  fit.component_values_.assign(p, std::vector<double>(n, 0.0));
  fit.converged_ = false;

  std::vector<double> partial(n);
  for (int iter = 1; iter <= config.backfit_max_iter; ++iter) {
    double max_change = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      for (std::size_t j = 0; j < n; ++j) {
        double r = y[j] - fit.intercept_;
        for (std::size_t o = 0; o < p; ++o)
          if (o != c) r -= fit.component_values_[o][j];
        partial[j] = r;
      }
      LocalRegression smoother(columns[c], partial, orders[c], config.span, 1);
      const std::vector<double> raw = smoother.evaluate(columns[c]);
      const double center = mean(raw);
      auto& values = fit.component_values_[c];
      for (std::size_t j = 0; j < n; ++j) {
        const double next = raw[j] - center;
        max_change = std::max(max_change, std::abs(next - values[j]));
        values[j] = next;
      }
      fit.components_[c] = {std::move(smoother), center};
    }
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) s += fit.component_values_[c][j];
      scale = std::max(scale, std::abs(s));
    }
    fit.iterations_ = iter;
    if (max_change <= config.backfit_tol * scale || max_change == 0.0) {
      fit.converged_ = true;
      break;
    }
  }
  fit.fitted_ = fit.predict(columns);
  return fit;
}

std::vector<double> residuals(const FittedSmoother& fit,
                              const std::vector<std::span<const double>>& columns,
                              std::span<const double> y) {
  std::vector<double> out = fit.predict(columns);
  if (out.size() != y.size()) throw Error(ErrorCode::shape_mismatch, "response length differs from predictors");
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = y[j] - out[j];
  return out;
}

}  // namespace anm
