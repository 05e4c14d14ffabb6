#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace anm {

enum class SmootherKind { local_linear, additive_backfit };

struct SmootherConfig {
  SmootherKind kind = SmootherKind::local_linear;
  double span = 0.75;  // fraction of the sample in each local window
  int degree = 2;      // single-parent local polynomial degree; backfit components use 1
  int backfit_max_iter = 20;
  double backfit_tol = 1e-6;

  friend bool operator==(const SmootherConfig&, const SmootherConfig&) = default;
};

struct LocalEstimate {
  double value = 0.0;
  double slope = 0.0;
};

/// Univariate LOESS: tricube-weighted local polynomial regression over the
/// span-nearest neighbours of each evaluation point. Outside the training
/// range the boundary fit is continued linearly.
class LocalRegression {
 public:
  LocalRegression() = default;
  LocalRegression(std::span<const double> x, std::span<const double> y, double span, int degree);
  /// Same, with a precomputed stable ascending order of x.
  LocalRegression(std::span<const double> x, std::span<const double> y,
                  std::span<const std::size_t> order, double span, int degree);

  LocalEstimate fit_at(double x0) const;

  /// OpenMP kernel over evaluation points.
  std::vector<double> evaluate(std::span<const double> points) const;
  /// Serial reference; bitwise-identical to evaluate().
  std::vector<double> evaluate_serial(std::span<const double> points) const;

  std::size_t window() const noexcept { return window_; }
  int degree() const noexcept { return degree_; }

 private:
  LocalEstimate fit_inside(double x0) const;

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::size_t window_ = 0;
  int degree_ = 1;
};

/// One additive term: a univariate smoother, centered to mean zero on the
/// training sample.
struct SmoothComponent {
  LocalRegression smoother;
  double center = 0.0;
};

/// Fitted regression of a response on p >= 1 predictors, as intercept plus
/// centered additive components. Immutable.
class FittedSmoother {
 public:
  const SmootherConfig& config() const noexcept { return config_; }
  double intercept() const noexcept { return intercept_; }
  std::size_t predictors() const noexcept { return components_.size(); }
  const std::vector<double>& fitted() const noexcept { return fitted_; }
  /// Centered training-sample values of component c.
  const std::vector<double>& component_values(std::size_t c) const { return component_values_[c]; }
  bool converged() const noexcept { return converged_; }
  int iterations() const noexcept { return iterations_; }

  /// Throws Error{shape_mismatch} when the column count differs from the fit.
  std::vector<double> predict(const std::vector<std::span<const double>>& columns) const;

 private:
  friend FittedSmoother fit_local_poly(std::span<const double>, std::span<const double>,
                                       const SmootherConfig&);
  friend FittedSmoother fit_additive(const std::vector<std::span<const double>>&,
                                     std::span<const double>, const SmootherConfig&);

  SmootherConfig config_;
  double intercept_ = 0.0;
  std::vector<SmoothComponent> components_;
  std::vector<std::vector<double>> component_values_;
  std::vector<double> fitted_;
  bool converged_ = true;
  int iterations_ = 0;
};

/// Throws Error{too_few_points} (n < 10 or span*n < degree+2) or
/// Error{degenerate_x} (all x equal). With fewer than degree+2 distinct x
/// values the degree is lowered to fit.
FittedSmoother fit_local_poly(std::span<const double> x, std::span<const double> y,
                              const SmootherConfig& config);

/// Backfitting with local-linear components; p == 1 delegates to fit_local_poly.
/// Non-convergence within backfit_max_iter is reported via converged().
FittedSmoother fit_additive(const std::vector<std::span<const double>>& columns,
                            std::span<const double> y, const SmootherConfig& config);

/// y - predict(columns).
std::vector<double> residuals(const FittedSmoother& fit,
                              const std::vector<std::span<const double>>& columns,
                              std::span<const double> y);

}  // namespace anm
