#include "scalefree/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "scalefree/errors.hpp"
#include "scalefree/fat_tails.hpp"
#include "scalefree/golden_cascade.hpp"
#include "scalefree/logistic_edge.hpp"
#include "scalefree/pink_noise.hpp"
#include "scalefree/scale_recursion.hpp"

namespace scalefree {

namespace {

using Wide = boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>;
using boost::multiprecision::number;
using WideNumber = number<Wide>;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

CheckResult make(int id, double measured, double threshold, const char* cmp,
                 std::string detail = {}) {
  CheckResult r;
  r.id = id;
  for (const auto& info : check_catalog()) {
    if (info.id == id) r.name = info.name;
  }
  r.measured = measured;
  r.threshold = threshold;
  r.comparison = cmp;
  const std::string c = cmp;
  r.passed = c == "<=" ? measured <= threshold
           : c == ">=" ? measured >= threshold
                       : measured == threshold;
  r.detail = std::move(detail);
  return r;
}

// |tau_- - t_-| against eta0^64 / (1 - eta0) at depth 5, in 256-bit
// arithmetic: the bound (1e-64 at eta0 = 0.1) sits far below binary64
// rounding. The binary64 discrepancy is reported alongside.
CheckResult zero_schedule_reduction() {
  double worst_ratio = 0.0;
  double worst_binary64 = 0.0;
  for (const char* text : {"0.1", "0.3", "0.5"}) {
    const WideNumber eta(text);
    const auto schedule = make_schedule(WideNumber("0.5"), ScheduleMode::zero, 5);
    const WideNumber value = tau_minus(eta, schedule).value;
    const WideNumber gap = abs(value - (WideNumber(1) - eta));
    const WideNumber bound = pow(eta, 64) / (WideNumber(1) - eta);
    worst_ratio = std::max(worst_ratio, static_cast<double>(gap / bound));

    const double e = std::stod(text);
    const double v = tau_minus(e, make_schedule(0.5, ScheduleMode::zero, 5)).value;
    worst_binary64 = std::max(worst_binary64, std::abs(v - (1.0 - e)));
  }
  return make(1, worst_ratio, 1.0, "<=",
              fmt("max |tau_- - t_-| / bound at 256 bits; binary64 gap %.3g", worst_binary64));
}

CheckResult continuity_and_slopes() {
  bool exact = true;
  double worst = 0.0;
  for (double eps1 : {1e-3, 5e-4, 1e-4}) {
    for (auto mode : {ScheduleMode::geometric, ScheduleMode::dyadic}) {
      const auto schedule = make_schedule(eps1, mode);
      exact = exact && tau_minus(0.0, schedule).value == 1.0 && tau_plus(0.0) == 1.0;
      const auto [left, right] = one_sided_slopes(schedule, 1e-4);
      worst = std::max({worst, std::abs(left - 1.0), std::abs(right - 1.0)});
    }
  }
  auto r = make(2, worst, 1e-3, "<=", exact ? "tau_-(0) == tau_+(0) == 1 exactly"
                                            : "tau(1) != 1 for some schedule");
  r.passed = r.passed && exact;
  return r;
}

CheckResult parity_breaking() {
  const auto standard = make_schedule(0.1, ScheduleMode::zero);
  double symmetric = 0.0;
  for (double eta : {0.0, 0.05, 0.1, 0.2, 0.3}) {
    symmetric = std::max(symmetric, parity_violation(eta, standard));
  }
  const double broken = parity_violation(0.1, make_schedule(0.1, ScheduleMode::geometric));
  auto r = make(3, broken, 1e-3, ">=",
                fmt("standard-solution violation %.3g (<= 1e-12 required)", symmetric));
  r.passed = r.passed && symmetric <= 1e-12;
  return r;
}

CheckResult golden_cascade_check() {
  const auto trace = cascade_run(1.0, 40);
  const long double nu = golden_mean<long double>();
  const double error =
      static_cast<double>(std::fabs(static_cast<long double>(trace.approximants.back()) - nu));
  const double expected[] = {1.0 / 2.0, 2.0 / 3.0, 3.0 / 5.0, 5.0 / 8.0, 8.0 / 13.0};
  bool exact = true;
  for (int k = 0; k < 5; ++k) exact = exact && trace.approximants[k] == expected[k];
  auto r = make(4, error, 1e-16, "<=",
                exact ? "first five approximants exact" : "approximant mismatch");
  r.passed = error < 1e-16 && exact;
  return r;
}

CheckResult chaos_threshold() {
  const auto located = locate_mu_infinity(1e-10);
  const double gap = std::abs(located.mu_infinity - 1.40115);
  return make(5, gap, 1e-5, "<=",
              fmt("mu_inf = %.12f from 2^%g cycles", located.mu_infinity,
                  located.cycles_used));
}

CheckResult edge_sensitivity() {
  const auto series = sensitivity_at_dyadic_times(kDefaultEdgeOffset, 12, mu_infinity(),
                                                  FitWindow{5, 12});
  const double mean_ratio = series.ratios.segment(5, 6).mean();
  const double ratio_err = std::abs(mean_ratio - 2.5029) / 2.5029;
  const auto& fit = *series.fit;
  const bool q_ok = std::abs(fit.q - 0.2445) <= 0.05;
  const bool lam_ok = std::abs(fit.lambda_q - 1.3236) <= 0.1;
  auto r = make(6, ratio_err, 0.02, "<=",
                fmt("mean ratio %.6f, q = %.5f, lambda_q = %.5f", mean_ratio, fit.q,
                    fit.lambda_q));
  r.passed = r.passed && q_ok && lam_ok;
  return r;
}

CheckResult q_exponential_limit() {
  double worst = 0.0;
  double worst_relative = 0.0;
  for (double q : {1.0 - 1e-6, 1.0 + 1e-6}) {
    for (int i = 0; i <= 2000; ++i) {
      const double x = 2.0 * i / 2000.0;
      const double gap = std::abs(q_exponential(x, q, 1.0) - std::exp(x));
      worst = std::max(worst, gap);
      worst_relative = std::max(worst_relative, gap / std::exp(x));
    }
  }
  return make(7, worst, 1e-5, "<=",
              fmt("sup |exp_q - exp| on [0,2]; relative %.3g", worst_relative));
}

CheckResult estimator_round_trip() {
  constexpr long kSegment = 1L << 12;
  // 32 half-overlapping segments need 33 * L / 2 samples.
  constexpr long kUsed = 33 * kSegment / 2;
  double worst = 0.0;
  std::string detail;
  for (double a : {0.0, 0.5, 1.0}) {
    NoiseSeries s = synthesize_powerlaw_noise(a, 1L << 17, 1000 + static_cast<int>(10 * a));
    s.values.conservativeResize(kUsed);
    const auto spec = periodogram(s, kSegment);
    if (spec.n_segments != 32) throw NumericalError("estimator_round_trip: segment count");
    worst = std::max(worst, std::abs(spec.fitted_slope_a - a));
    detail += fmt("a=%.1f->%.4f ", a, spec.fitted_slope_a);
  }
  return make(8, worst, 0.05, "<=", detail);
}

CheckResult pink_hypothesis() {
  constexpr int kSeeds = 32;
  constexpr long kLength = 1L << 14;
  constexpr long kSegment = 1L << 10;
  std::vector<SpectrumEstimate> spectra;
  spectra.reserve(kSeeds);
  for (int i = 0; i < kSeeds; ++i) {
    const SigmaProcess sigma{0.2, 0.02, static_cast<std::uint64_t>(i),
                             SigmaScheme::per_octave_constant};
    spectra.push_back(periodogram(generate_fluctuation_series(sigma, kLength, 1.0, 1.0), kSegment));
  }
  const auto mean = average_spectra(spectra);
  const double deviation = mean.fitted_slope_a - 0.8;
  return make(9, std::abs(deviation), 0.2, "<=",
              fmt("fitted a = %.4f vs 1 - <sigma> = 0.8, deviation %+.4f",
                  mean.fitted_slope_a, deviation));
}

CheckResult fat_tail_exactness() {
  double worst = 0.0;
  for (double eps : {0.1, 0.5}) {
    const auto model = make_fat_normal(eps);
    for (int i = 0; i <= 900; ++i) {
      const double t = 1.0 + 9.0 * i / 900.0;
      for (double s : {t, -t}) {
        const double diff = std::log(fat_kernel(s, model)) - std::log(normal_kernel(s));
        worst = std::max(worst, std::abs(diff + eps * std::log(t)));
      }
    }
  }
  const auto model = make_fat_normal(0.5);
  const double ks = ks_distance(sample_fat_normal(model, 1000000, 2024), model);
  auto r = make(10, worst, 1e-12, "<=", fmt("sampler KS distance %.5f (< 0.005 required)", ks));
  r.passed = r.passed && ks < 0.005;
  return r;
}

CheckResult scale_equation() {
  double worst = 0.0;
  for (double sigma : {0.5, 1.0, 3.0}) {
    worst = std::max(worst, std::abs(scale_equation_residual(sigma, 1.0, 1e-5)));
  }
  return make(11, worst, 1e-8, "<=", "K = 1, h = 1e-5");
}

}  // namespace

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> catalog = {
      {1, "zero-schedule reduction", 1.0},
      {2, "continuity and slope matching at t = 1", 1.0},
      {3, "parity breaking", 1.0},
      {4, "golden-mean cascade", 0.1},
      {5, "chaos threshold", 30.0},
      {6, "edge-of-chaos sensitivity", 60.0},
      {7, "q-exponential classical limit", 0.1},
      {8, "spectral estimator round trip", 30.0},
      {9, "1/f hypothesis (diagnostic)", 0.0},
      {10, "fat-tail exactness and sampler", 60.0},
      {11, "scale equation residual", 0.1},
  };
  return catalog;
}

CheckResult run_check(int id) {
  switch (id) {
    case 1: return zero_schedule_reduction();
    case 2: return continuity_and_slopes();
    case 3: return parity_breaking();
    case 4: return golden_cascade_check();
    case 5: return chaos_threshold();
    case 6: return edge_sensitivity();
    case 7: return q_exponential_limit();
    case 8: return estimator_round_trip();
    case 9: return pink_hypothesis();
    case 10: return fat_tail_exactness();
    case 11: return scale_equation();
    default: break;
  }
  throw ParameterError("unknown check id " + std::to_string(id));
}

}  // namespace scalefree
