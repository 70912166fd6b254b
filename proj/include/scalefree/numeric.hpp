#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Core>

namespace scalefree {

/// Neumaier-compensated running sum. Works for any scalar with the usual
/// arithmetic and an `abs` reachable by ADL.
template <typename Scalar = double>
class CompensatedSum {
 public:
  CompensatedSum& operator+=(const Scalar& x) {
    using std::abs;
    const Scalar t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  Scalar value() const { return sum_ + carry_; }

 private:
  Scalar sum_{0};
  Scalar carry_{0};
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  int n_points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Throws FitError when
/// fewer than two points are given or x has zero variance.
LineFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval. Splits the
/// worst interval until the summed error estimate is below
/// max(abs_tol, rel_tol * |value|). Throws ConvergenceError if the interval
/// budget runs out first.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol = 1e-12,
                           double abs_tol = 1e-15, int max_intervals = 4000);

/// Symmetric difference quotient (f(x+h) - f(x-h)) / 2h.
template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace scalefree
