#pragma once

// Relaxation with a fluctuating power-law exponent, T(t) - T0 = A t^sigma(t)
// e^{-eps t}, its fluctuation series T_f(t) = t^sigma(t), and the spectral
// machinery used to measure the series: segment-averaged tapered
// periodograms, log-log slope fits, and a 1/f^a synthesis oracle.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace scalefree {

enum class SigmaScheme { per_octave_constant, fixed_constant };

/// The random exponent sigma(t). Under per_octave_constant, sigma is drawn
/// once per dyadic octave [2^k, 2^{k+1}) as mean + amplitude * N(0, 1); the
/// draw for octave k depends only on (seed, k).
struct SigmaProcess {
  double mean_sigma = 0.0;
  double amplitude = 0.02;
  std::uint64_t seed = 0;
  SigmaScheme scheme = SigmaScheme::per_octave_constant;

  double octave_draw(int octave) const;
  double sigma_at(double t) const;
  void validate() const;
};

struct NoiseSeries {
  double dt = 1.0;
  double t0 = 1.0;
  double eps = 0.0;
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
  double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt; }
  Eigen::VectorXd times() const;
};

/// T0 + A t^sigma(t) e^{-eps t}.
double relaxation_solution(double T0, double A, double eps, const SigmaProcess& sigma,
                           double t);

/// T_f(t_k) = t_k^sigma(t_k), t_k = t0 + k dt.
NoiseSeries generate_fluctuation_series(const SigmaProcess& sigma, long n, double dt,
                                        double t0);

struct AutocorrelationPoint {
  long lag = 0;
  double time = 0.0;       // t0 + lag dt
  double empirical = 0.0;  // <T_f(t) T_f(t0)> over the ensemble
  double model = 0.0;      // c t^<sigma>, c = <T_f(t0)>
};

inline constexpr int kMinEnsemble = 8;

/// Ensemble of fluctuation series with seeds base.seed + i, i < ensemble.
/// Refuses fewer than kMinEnsemble members for the random scheme.
std::vector<AutocorrelationPoint> autocorrelation_check(const SigmaProcess& base,
                                                        int ensemble, long n, double dt,
                                                        double t0,
                                                        std::span<const long> lags);

enum class Window { hann, rectangular };

struct FitBand {
  double f_lo = 0.0;
  double f_hi = 0.0;
};

struct SpectrumEstimate {
  Eigen::VectorXd frequencies;  // k / (L dt), k = 1..L/2
  Eigen::VectorXd power;        // one-sided PSD
  int n_segments = 0;
  long segment_length = 0;
  double dt = 1.0;
  // Mean power of the tapered, mean-removed segments; equals sum(power) * df.
  double segment_variance = 0.0;
  FitBand fit_band;
  double fitted_slope_a = 0.0;  // NaN when the band holds too few bins
};

inline constexpr double kDefaultOverlap = 0.5;
inline constexpr int kMinBandBins = 16;

/// [4/L, 1/8] cycles per sample, in units of 1/dt.
FitBand default_fit_band(long segment_length, double dt);

/// Segment-averaged periodogram. Each segment is tapered, has its
/// window-weighted mean removed (so the DC bin vanishes), and is normalized
/// so that sum(power) * df equals the mean tapered segment variance.
SpectrumEstimate periodogram(const NoiseSeries& series, long segment_length,
                             double overlap_fraction = kDefaultOverlap,
                             Window window = Window::hann);

/// Bin-wise mean of spectra sharing a frequency grid, combined in index order.
SpectrumEstimate average_spectra(std::span<const SpectrumEstimate> spectra);

/// Least-squares slope of -ln S against ln f over bins inside the band.
double fit_spectral_slope(const SpectrumEstimate& spectrum, FitBand band);

/// Gaussian noise with expected PSD proportional to 1/f^a: complex normal
/// amplitudes weighted by f^{-a/2}, inverse real FFT, scaled to unit
/// variance. n must be a power of two, a in [0, 2].
NoiseSeries synthesize_powerlaw_noise(double a, long n, std::uint64_t seed);

/// Empirical log-log slope of the ensemble autocorrelation against time.
double autocorrelation_slope(std::span<const AutocorrelationPoint> points);

bool is_power_of_two(long n);

}  // namespace scalefree
