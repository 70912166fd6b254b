#pragma once

// Normal variate with a power-law modulated tail, density proportional to
// |t|^{-eps} e^{-t^2/2}, plus the fat-variable helpers and the scale equation
// sigma d(eps)/d(sigma) = -eps.

#include <cstdint>

#include <Eigen/Core>

namespace scalefree {

inline constexpr double kDefaultBulkCut = 1e-3;

/// Kernel |t|^{-eps} e^{-t^2/2} for |t| >= bulk_cut, held at its bulk_cut
/// value inside. `normalization` is the integral of the kernel.
struct FatNormalModel {
  double eps = 0.0;
  double bulk_cut = kDefaultBulkCut;
  double normalization = 0.0;
};

/// Builds the model and integrates the kernel (relative error ~1e-9 or better).
FatNormalModel make_fat_normal(double eps, double bulk_cut = kDefaultBulkCut);

double normal_kernel(double t);
double normal_density(double t);
double normal_cdf(double t);

/// Unnormalized kernel.
double fat_kernel(double t, const FatNormalModel& model);
double fat_density(double t, const FatNormalModel& model);
double fat_cdf(double t, const FatNormalModel& model);

/// Integral of the kernel over [a, b] with 0 <= a <= b (b may be +inf).
double fat_kernel_integral(double a, double b, const FatNormalModel& model);

/// Probability that a draw is accepted by sample_fat_normal.
double sampler_acceptance_rate(const FatNormalModel& model);

/// n draws by mixture rejection: uniform inside bulk_cut (exact), power-law
/// proposal on [bulk_cut, 1) accepted with e^{-t^2/2}, normal proposal on
/// |t| >= 1 accepted with |t|^{-eps}. Throws ParameterError when the
/// acceptance rate falls below 10%.
Eigen::VectorXd sample_fat_normal(const FatNormalModel& model, long n, std::uint64_t seed);

/// sup |F_n - F| of the empirical CDF of `samples` against the model CDF;
/// the model CDF is accumulated by quadrature between sorted samples.
double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const FatNormalModel& model);

/// t + eps ln t.
double fat_variable(double t, double eps);
/// t^2 + eps ln t^2.
double fat_variable_squared(double t, double eps);

/// K / sigma, the general solution of sigma d(eps)/d(sigma) = -eps.
double epsilon_of_scale(double sigma, double K);

/// sigma (eps(sigma+h) - eps(sigma-h)) / 2h + eps(sigma) for eps = K / sigma.
double scale_equation_residual(double sigma, double K, double h);

}  // namespace scalefree
