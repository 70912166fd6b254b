#include "scalefree/logistic_edge.hpp"

#include <cmath>
#include <string>

#include "scalefree/errors.hpp"
#include "scalefree/numeric.hpp"

namespace scalefree {

namespace {

void check_params(const MapParams& params) {
  if (!(params.mu > 0.0 && params.mu <= 2.0)) {
    throw ParameterError("logistic map: mu must lie in (0, 2]");
  }
  if (!(params.x0 >= -1.0 && params.x0 <= 1.0)) {
    throw ParameterError("logistic map: x0 must lie in [-1, 1]");
  }
}

// f^{2^k}_mu(0) and its mu-derivative.
std::pair<double, double> iterate_from_extremum(double mu, long count) {
  double x = 0.0;
  double dx = 0.0;
  for (long i = 0; i < count; ++i) {
    dx = -x * x - 2.0 * mu * x * dx;
    x = logistic_step(mu, x);
  }
  return {x, dx};
}

}  // namespace

Eigen::VectorXd iterate_map(const MapParams& params, long n) {
  check_params(params);
  if (n < 0) throw ParameterError("iterate_map: n must be >= 0");
  Eigen::VectorXd orbit(n + 1);
  orbit(0) = params.x0;
  for (long k = 0; k < n; ++k) orbit(k + 1) = logistic_step(params.mu, orbit(k));
  return orbit;
}

double log_sensitivity(const MapParams& params, long t) {
  check_params(params);
  if (t < 0) throw ParameterError("sensitivity: t must be >= 0");
  CompensatedSum<double> sum;
  double x = params.x0;
  const double two_mu = 2.0 * params.mu;
  for (long k = 0; k < t; ++k) {
    if (x == 0.0) {
      throw DomainError("sensitivity: iterate " + std::to_string(k) +
                        " hits the extremum x = 0 (singular derivative); perturb x0");
    }
    sum += std::log(two_mu * std::abs(x));
    x = logistic_step(params.mu, x);
  }
  return sum.value();
}

double sensitivity(const MapParams& params, long t) {
  return std::exp(log_sensitivity(params, t));
}

double lyapunov_average(const MapParams& params, long t) {
  if (t < 1) throw ParameterError("lyapunov_average: t must be >= 1");
  return log_sensitivity(params, t) / static_cast<double>(t);
}

double fixed_point(double mu) {
  if (!(mu > 0.0)) throw ParameterError("fixed_point: mu must be positive");
  return (std::sqrt(1.0 + 4.0 * mu) - 1.0) / (2.0 * mu);
}

double fixed_point_multiplier(double mu) { return -2.0 * mu * fixed_point(mu); }

double superstable_parameter(int k, double guess) {
  if (k < 1 || k > 30) throw ParameterError("superstable_parameter: k out of range");
  const long period = 1L << k;
  double mu = guess;
  double step = 1.0;
  for (int it = 0; it < 60; ++it) {
    const auto [value, slope] = iterate_from_extremum(mu, period);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    step = value / slope;
    mu -= step;
    if (std::abs(step) <= 2e-15 * std::abs(mu)) return mu;
  }
  // Large cycles stall in rounding noise a few ulps from the root.
  if (std::abs(step) <= 1e-13) return mu;
  throw ConvergenceError("superstable_parameter: Newton did not converge for k = " +
                         std::to_string(k));
}

ChaosThreshold locate_mu_infinity(double tolerance) {
  if (!(tolerance >= 1e-12)) {
    throw ParameterError("find_mu_infinity: tolerance must be >= 1e-12");
  }
  constexpr int kMaxCycles = 22;
  // Feigenbaum's delta only seeds the first guess; later guesses use the
  // measured ratio.
  constexpr double kDeltaSeed = 4.669;

  ChaosThreshold out;
  out.superstable.push_back(1.0);  // f(f(0)) = 1 - mu = 0
  out.superstable.push_back(superstable_parameter(2, 1.31));
  double previous_estimate = 0.0;
  bool have_previous = false;
  for (int k = 3; k <= kMaxCycles; ++k) {
    const auto& s = out.superstable;
    const std::size_t m = s.size();
    const double delta =
        m >= 3 ? (s[m - 2] - s[m - 3]) / (s[m - 1] - s[m - 2]) : kDeltaSeed;
    const double guess = s[m - 1] + (s[m - 1] - s[m - 2]) / delta;
    out.superstable.push_back(superstable_parameter(k, guess));

    const std::size_t n = out.superstable.size();
    const double d_last = out.superstable[n - 1] - out.superstable[n - 2];
    const double d_prev = out.superstable[n - 2] - out.superstable[n - 3];
    const double ratio = d_prev / d_last;
    const double estimate = out.superstable[n - 1] + d_last / (ratio - 1.0);
    out.cycles_used = k;
    out.mu_infinity = estimate;
    if (have_previous) {
      out.last_change = std::abs(estimate - previous_estimate);
      if (out.last_change < tolerance) return out;
    }
    previous_estimate = estimate;
    have_previous = true;
  }
  throw ConvergenceError("find_mu_infinity: no convergence within 2^" +
                         std::to_string(kMaxCycles) + " cycles; last bracket [" +
                         std::to_string(out.superstable.back()) + ", " +
                         std::to_string(out.mu_infinity) + "]");
}

double find_mu_infinity(double tolerance) {
  return locate_mu_infinity(tolerance).mu_infinity;
}

double mu_infinity() {
  static const double value = find_mu_infinity(1e-12);
  return value;
}

SensitivitySeries sensitivity_at_dyadic_times(double x0, int n_max, double mu,
                                              FitWindow window) {
  if (n_max < 3 || n_max > 24) {
    throw ParameterError("sensitivity_at_dyadic_times: n_max must lie in [3, 24]");
  }
  const MapParams params{mu, x0};
  check_params(params);

  SensitivitySeries s;
  s.mu = mu;
  s.x0 = x0;
  s.times.resize(n_max + 1);
  s.log_xi.resize(n_max + 1);
  s.ratios.resize(n_max);

  CompensatedSum<double> sum;
  double x = x0;
  const double two_mu = 2.0 * mu;
  long t = 0;
  for (int n = 0; n <= n_max; ++n) {
    const long target = 1L << n;
    for (; t < target; ++t) {
      if (x == 0.0) {
        throw DomainError("sensitivity: iterate " + std::to_string(t) +
                          " hits the extremum x = 0 (singular derivative); perturb x0");
      }
      sum += std::log(two_mu * std::abs(x));
      x = logistic_step(mu, x);
    }
    s.times(n) = static_cast<double>(target);
    s.log_xi(n) = sum.value();
  }
  s.xi = s.log_xi.array().exp();
  for (int n = 0; n < n_max; ++n) s.ratios(n) = std::exp(s.log_xi(n + 1) - s.log_xi(n));

  const int lo = std::max(window.lo, 0);
  const int hi = std::min(window.hi, n_max);
  if (hi - lo + 1 >= kMinFitPoints) s.fit = fit_q_exponential(s, window);
  return s;
}

SensitivitySeries sensitivity_at_dyadic_times(double x0, int n_max) {
  return sensitivity_at_dyadic_times(x0, n_max, mu_infinity());
}

QFit fit_q_exponential(const SensitivitySeries& series, FitWindow window) {
  const int lo = std::max(window.lo, 0);
  const int hi = std::min(window.hi, series.n_max());
  const int count = hi - lo + 1;
  if (count < kMinFitPoints) {
    throw FitError("fit_q_exponential: need at least " + std::to_string(kMinFitPoints) +
                   " dyadic points in the window");
  }
  Eigen::VectorXd lt(count), lx(count);
  for (int i = 0; i < count; ++i) {
    const int n = lo + i;
    if (!(series.xi(n) > 0.0) || !std::isfinite(series.log_xi(n))) {
      throw FitError("fit_q_exponential: non-positive sensitivity");
    }
    lt(i) = std::log(series.times(n));
    lx(i) = series.log_xi(n);
  }
  const LineFit line = fit_line(lt, lx);
  if (std::abs(line.slope) < 1e-12) {
    throw FitError("fit_q_exponential: zero slope, q is undefined");
  }
  QFit fit;
  fit.slope = line.slope;
  fit.q = 1.0 - 1.0 / line.slope;
  fit.p = 1.0 - fit.q;
  fit.lambda_p = 1.0 / fit.p;
  fit.lambda_q = fit.lambda_p;
  fit.n_lo = lo;
  fit.n_hi = hi;
  return fit;
}

double q_exponential(double x, double q, double lam) {
  if (q == 1.0) return std::exp(lam * x);
  const double u = (1.0 - q) * lam * x;
  if (!(1.0 + u > 0.0)) throw DomainError("q_exponential: base 1 + (1-q) lam x <= 0");
  return std::exp(std::log1p(u) / (1.0 - q));
}

}  // namespace scalefree
