#include "scalefree/pink_noise.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include <unsupported/Eigen/FFT>

#include "scalefree/errors.hpp"
#include "scalefree/numeric.hpp"

namespace scalefree {

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

void SigmaProcess::validate() const {
  if (!(mean_sigma >= 0.0 && mean_sigma < 0.5)) {
    throw ParameterError("sigma process: mean_sigma must lie in [0, 0.5)");
  }
  if (!(amplitude >= 0.0)) throw ParameterError("sigma process: amplitude must be >= 0");
}

double SigmaProcess::octave_draw(int octave) const {
  if (scheme == SigmaScheme::fixed_constant) return mean_sigma;
  const auto k = static_cast<std::uint32_t>(octave);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), k};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  return mean_sigma + amplitude * normal(rng);
}

double SigmaProcess::sigma_at(double t) const {
  if (!(t > 0.0)) throw ParameterError("sigma(t): t must be positive");
  if (scheme == SigmaScheme::fixed_constant) return mean_sigma;
  return octave_draw(std::ilogb(t));
}

Eigen::VectorXd NoiseSeries::times() const {
  return Eigen::VectorXd::LinSpaced(size(), t0, t0 + dt * static_cast<double>(size() - 1));
}

double relaxation_solution(double T0, double A, double eps, const SigmaProcess& sigma,
                           double t) {
  if (!(t > 0.0)) throw ParameterError("relaxation_solution: t must be positive");
  if (!(eps >= 0.0)) throw ParameterError("relaxation_solution: eps must be >= 0");
  return T0 + A * std::pow(t, sigma.sigma_at(t)) * std::exp(-eps * t);
}

NoiseSeries generate_fluctuation_series(const SigmaProcess& sigma, long n, double dt,
                                        double t0) {
  sigma.validate();
  if (n < 2) throw ParameterError("generate_fluctuation_series: need n >= 2");
  if (!(dt > 0.0)) throw ParameterError("generate_fluctuation_series: dt must be positive");
  if (!(t0 > 0.0)) throw ParameterError("generate_fluctuation_series: t0 must be positive");

  NoiseSeries series;
  series.dt = dt;
  series.t0 = t0;
  series.values.resize(n);
  std::map<int, double> draws;
  for (long k = 0; k < n; ++k) {
    const double t = series.time(k);
    const int octave = std::ilogb(t);
    auto it = draws.find(octave);
    if (it == draws.end()) it = draws.emplace(octave, sigma.octave_draw(octave)).first;
    series.values(k) = std::pow(t, it->second);
  }
  return series;
}

std::vector<AutocorrelationPoint> autocorrelation_check(const SigmaProcess& base,
                                                        int ensemble, long n, double dt,
                                                        double t0,
                                                        std::span<const long> lags) {
  base.validate();
  if (base.scheme == SigmaScheme::per_octave_constant && ensemble < kMinEnsemble) {
    throw ParameterError("autocorrelation_check: ensemble of at least " +
                         std::to_string(kMinEnsemble) + " seeds required");
  }
  if (ensemble < 1) throw ParameterError("autocorrelation_check: empty ensemble");
  if (!(dt > 0.0) || !(t0 > 0.0)) {
    throw ParameterError("autocorrelation_check: dt and t0 must be positive");
  }
  for (long lag : lags) {
    if (lag < 0 || lag >= n) throw ParameterError("autocorrelation_check: lag outside series");
  }

  std::vector<CompensatedSum<double>> products(lags.size());
  CompensatedSum<double> origin;
  for (int member = 0; member < ensemble; ++member) {
    SigmaProcess sigma = base;
    sigma.seed = base.seed + static_cast<std::uint64_t>(member);
    const double at_origin = std::pow(t0, sigma.sigma_at(t0));
    origin += at_origin;
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const double t = t0 + static_cast<double>(lags[i]) * dt;
      products[i] += std::pow(t, sigma.sigma_at(t)) * at_origin;
    }
  }
  const double c = origin.value() / ensemble;
  std::vector<AutocorrelationPoint> out;
  out.reserve(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const double t = t0 + static_cast<double>(lags[i]) * dt;
    out.push_back({lags[i], t, products[i].value() / ensemble,
                   c * std::pow(t, base.mean_sigma)});
  }
  return out;
}

double autocorrelation_slope(std::span<const AutocorrelationPoint> points) {
  Eigen::VectorXd lt(points.size()), lc(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].empirical > 0.0) || !(points[i].time > 0.0)) {
      throw FitError("autocorrelation_slope: non-positive point");
    }
    lt(i) = std::log(points[i].time);
    lc(i) = std::log(points[i].empirical);
  }
  return fit_line(lt, lc).slope;
}

FitBand default_fit_band(long segment_length, double dt) {
  return {4.0 / (static_cast<double>(segment_length) * dt), 1.0 / (8.0 * dt)};
}

namespace {

Eigen::VectorXd make_window(long length, Window window) {
  if (window == Window::rectangular) return Eigen::VectorXd::Ones(length);
  Eigen::VectorXd w(length);
  for (long l = 0; l < length; ++l) {
    w(l) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(l) /
                                 static_cast<double>(length)));
  }
  return w;
}

double slope_or_nan(const SpectrumEstimate& s) {
  try {
    return fit_spectral_slope(s, s.fit_band);
  } catch (const FitError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SpectrumEstimate periodogram(const NoiseSeries& series, long segment_length,
                             double overlap_fraction, Window window) {
  const long n = series.size();
  if (!is_power_of_two(segment_length) || segment_length < 8) {
    throw ParameterError("periodogram: segment length must be a power of two >= 8");
  }
  if (segment_length > n) throw ParameterError("periodogram: segment longer than series");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw ParameterError("periodogram: overlap must lie in [0, 1)");
  }
  const long L = segment_length;
  const long step = std::max<long>(
      1, std::lround(static_cast<double>(L) * (1.0 - overlap_fraction)));
  const int segments = static_cast<int>((n - L) / step + 1);
  const long half = L / 2;

  const Eigen::VectorXd w = make_window(L, window);
  const double w_sum = w.sum();
  const double w_sq = w.squaredNorm();

  Eigen::FFT<double> fft;
  std::vector<double> buffer(static_cast<std::size_t>(L));
  std::vector<std::complex<double>> spectrum;
  Eigen::VectorXd accum = Eigen::VectorXd::Zero(half);
  CompensatedSum<double> variance;

  for (int s = 0; s < segments; ++s) {
    const auto x = series.values.segment(static_cast<Eigen::Index>(s) * step, L);
    const double weighted_mean = w.dot(x) / w_sum;
    for (long l = 0; l < L; ++l) buffer[l] = w(l) * (x(l) - weighted_mean);
    double energy = 0.0;
    for (double v : buffer) energy += v * v;
    variance += energy / w_sq;
    fft.fwd(spectrum, buffer);
    for (long k = 1; k <= half; ++k) accum(k - 1) += std::norm(spectrum[k]);
  }

  SpectrumEstimate out;
  out.segment_length = L;
  out.dt = series.dt;
  out.n_segments = segments;
  out.frequencies = Eigen::VectorXd::LinSpaced(half, 1.0, static_cast<double>(half)) /
                    (static_cast<double>(L) * series.dt);
  out.power = accum * (series.dt / (w_sq * segments));
  out.power.head(half - 1) *= 2.0;  // one-sided; the Nyquist bin is not mirrored
  out.segment_variance = variance.value() / segments;
  out.fit_band = default_fit_band(L, series.dt);
  out.fitted_slope_a = slope_or_nan(out);
  return out;
}

SpectrumEstimate average_spectra(std::span<const SpectrumEstimate> spectra) {
  if (spectra.empty()) throw ParameterError("average_spectra: no spectra");
  SpectrumEstimate out = spectra.front();
  out.power.setZero();
  out.n_segments = 0;
  CompensatedSum<double> variance;
  for (const auto& s : spectra) {
    if (s.frequencies.size() != out.frequencies.size() ||
        s.segment_length != out.segment_length || s.dt != out.dt) {
      throw ParameterError("average_spectra: frequency grids differ");
    }
    out.power += s.power;
    out.n_segments += s.n_segments;
    variance += s.segment_variance;
  }
  const double count = static_cast<double>(spectra.size());
  out.power /= count;
  out.segment_variance = variance.value() / count;
  out.fitted_slope_a = slope_or_nan(out);
  return out;
}

double fit_spectral_slope(const SpectrumEstimate& spectrum, FitBand band) {
  if (!(band.f_lo > 0.0) || !(band.f_hi > band.f_lo)) {
    throw ParameterError("fit_spectral_slope: band must satisfy 0 < f_lo < f_hi");
  }
  std::vector<double> lf, ls;
  for (Eigen::Index k = 0; k < spectrum.frequencies.size(); ++k) {
    const double f = spectrum.frequencies(k);
    if (f < band.f_lo || f > band.f_hi || !(spectrum.power(k) > 0.0)) continue;
    lf.push_back(std::log(f));
    ls.push_back(-std::log(spectrum.power(k)));
  }
  if (lf.empty()) throw FitError("fit_spectral_slope: empty band");
  if (static_cast<int>(lf.size()) < kMinBandBins) {
    throw FitError("fit_spectral_slope: band holds fewer than " +
                   std::to_string(kMinBandBins) + " bins");
  }
  const Eigen::Map<const Eigen::VectorXd> x(lf.data(), static_cast<Eigen::Index>(lf.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ls.data(), static_cast<Eigen::Index>(ls.size()));
  return fit_line(x, y).slope;
}

NoiseSeries synthesize_powerlaw_noise(double a, long n, std::uint64_t seed) {
  if (!(a >= 0.0 && a <= 2.0)) throw ParameterError("synthesize: slope a must lie in [0, 2]");
  if (!is_power_of_two(n) || n < 4) throw ParameterError("synthesize: n must be a power of two >= 4");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const long half = n / 2;
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n));
  for (long k = 1; k <= half; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    const double amp = std::pow(f, -0.5 * a);
    if (k == half) {
      spectrum[k] = amp * normal(rng);
    } else {
      const double re = normal(rng);
      const double im = normal(rng);
      spectrum[k] = amp * std::complex<double>(re, im) / std::numbers::sqrt2;
      spectrum[n - k] = std::conj(spectrum[k]);
    }
  }

  Eigen::FFT<double> fft;
  std::vector<double> samples;
  fft.inv(samples, spectrum);

  NoiseSeries series;
  series.dt = 1.0;
  series.t0 = 1.0;
  series.values = Eigen::Map<Eigen::VectorXd>(samples.data(), n);
  const double mean = series.values.mean();
  const double sd = std::sqrt((series.values.array() - mean).square().mean());
  series.values = (series.values.array() - mean) / sd;
  return series;
}

}  // namespace scalefree
