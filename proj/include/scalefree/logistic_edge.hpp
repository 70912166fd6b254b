#pragma once

// Quadratic map f_mu(x) = 1 - mu x^2 on [-1, 1] at the period-doubling
// accumulation point, and the q-exponential law of its sensitivity to
// initial conditions.

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace scalefree {

struct MapParams {
  double mu = 0.0;
  double x0 = 0.0;
};

inline double logistic_step(double mu, double x) { return 1.0 - mu * x * x; }

/// x_0..x_n.
Eigen::VectorXd iterate_map(const MapParams& params, long n);

/// ln xi_t = sum_{k<t} ln(2 mu |x_k|), compensated. Throws DomainError when an
/// iterate lands exactly on the extremum x = 0.
double log_sensitivity(const MapParams& params, long t);
double sensitivity(const MapParams& params, long t);

/// ln xi_t / t.
double lyapunov_average(const MapParams& params, long t);

/// Positive fixed point of f_mu and the multiplier f'(x*) there.
double fixed_point(double mu);
double fixed_point_multiplier(double mu);

/// Parameter of the superstable 2^k cycle (f^{2^k}_mu(0) = 0), k >= 1.
double superstable_parameter(int k, double guess);

struct ChaosThreshold {
  double mu_infinity = 0.0;
  double last_change = 0.0;
  int cycles_used = 0;                 // highest k of the superstable 2^k cycle
  std::vector<double> superstable;     // mu at k = 1, 2, ...
};

/// Accumulation point of the superstable cycles, extrapolated with the
/// running doubling ratio; stops once successive extrapolations differ by less
/// than `tolerance` (>= 1e-12).
ChaosThreshold locate_mu_infinity(double tolerance);
double find_mu_infinity(double tolerance);

/// mu_infinity at the library's working tolerance, computed once per process.
double mu_infinity();

struct QFit {
  double q = 0.0;
  double lambda_q = 0.0;
  double slope = 0.0;     // d ln xi / d ln t
  double p = 0.0;         // 1 - q
  double lambda_p = 0.0;  // with p lambda_p = 1
  int n_lo = 0;
  int n_hi = 0;
};

struct FitWindow {
  int lo = 5;
  int hi = 12;
};

struct SensitivitySeries {
  double mu = 0.0;
  double x0 = 0.0;
  Eigen::VectorXd times;   // 2^0 .. 2^n_max
  Eigen::VectorXd log_xi;
  Eigen::VectorXd xi;
  Eigen::VectorXd ratios;  // xi_{2^{n+1}} / xi_{2^n}, n = 0..n_max-1
  std::optional<QFit> fit;

  int n_max() const { return static_cast<int>(times.size()) - 1; }
};

inline constexpr double kDefaultEdgeOffset = 1e-8;

/// xi at t = 2^n, n = 0..n_max (3 <= n_max <= 24). The q-exponential fit is
/// attached when the window holds at least five points.
SensitivitySeries sensitivity_at_dyadic_times(double x0, int n_max, double mu,
                                              FitWindow window = {});
SensitivitySeries sensitivity_at_dyadic_times(double x0, int n_max);

/// Least squares of ln xi against ln t over n in the window: slope s gives
/// q = 1 - 1/s and, through p lambda_p = 1 with p = 1 - q, lambda_q = s.
QFit fit_q_exponential(const SensitivitySeries& series, FitWindow window = {});

/// [1 + (1 - q) lam x]^{1/(1 - q)}; exp(lam x) at q = 1.
double q_exponential(double x, double q, double lam);

inline constexpr int kMinFitPoints = 5;

}  // namespace scalefree
