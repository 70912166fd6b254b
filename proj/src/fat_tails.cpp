#include "scalefree/fat_tails.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "scalefree/errors.hpp"
#include "scalefree/numeric.hpp"

namespace scalefree {

namespace {

// Beyond this the kernel is below e^{-800}.
constexpr double kTailCap = 40.0;
constexpr double kRelTol = 1e-12;
constexpr double kAbsTol = 1e-16;

double bulk_value(const FatNormalModel& m) {
  return std::pow(m.bulk_cut, -m.eps) * std::exp(-0.5 * m.bulk_cut * m.bulk_cut);
}

// Integral over [a, b] within [bulk_cut, 1] through u = t^{1-eps}, which
// removes the t^{-eps} cusp from the integrand.
double inner_integral(double a, double b, double eps) {
  const double power = 1.0 - eps;
  const auto integrand = [&](double u) {
    const double t = std::pow(u, 1.0 / power);
    return std::exp(-0.5 * t * t) / power;
  };
  return integrate(integrand, std::pow(a, power), std::pow(b, power), kRelTol, kAbsTol).value;
}

double outer_integral(double a, double b, double eps) {
  const auto integrand = [&](double t) { return std::pow(t, -eps) * std::exp(-0.5 * t * t); };
  return integrate(integrand, a, b, kRelTol, kAbsTol).value;
}

double signed_integral(double x, double y, const FatNormalModel& m) {
  if (x >= 0.0) return fat_kernel_integral(x, y, m);
  if (y <= 0.0) return fat_kernel_integral(-y, -x, m);
  return fat_kernel_integral(0.0, -x, m) + fat_kernel_integral(0.0, y, m);
}

void check_model(const FatNormalModel& m) {
  if (!(m.eps >= 0.0 && m.eps < 1.0)) throw ParameterError("fat normal: eps must lie in [0, 1)");
  if (!(m.bulk_cut >= 0.0 && m.bulk_cut < 1.0)) {
    throw ParameterError("fat normal: bulk_cut must lie in [0, 1)");
  }
}

}  // namespace

double fat_kernel_integral(double a, double b, const FatNormalModel& model) {
  if (!(a >= 0.0) || b < a) throw ParameterError("fat_kernel_integral: need 0 <= a <= b");
  const double c = model.bulk_cut;
  double total = 0.0;
  if (a < c) total += (std::min(b, c) - a) * bulk_value(model);
  const double lo_mid = std::max(a, c);
  const double hi_mid = std::min(b, 1.0);
  if (hi_mid > lo_mid) total += inner_integral(lo_mid, hi_mid, model.eps);
  const double lo_out = std::max(a, 1.0);
  const double hi_out = std::min(b, kTailCap);
  if (hi_out > lo_out) total += outer_integral(lo_out, hi_out, model.eps);
  return total;
}

FatNormalModel make_fat_normal(double eps, double bulk_cut) {
  FatNormalModel m{eps, bulk_cut, 0.0};
  check_model(m);
  m.normalization = 2.0 * fat_kernel_integral(0.0, kTailCap, m);
  return m;
}

double normal_kernel(double t) { return std::exp(-0.5 * t * t); }

double normal_density(double t) {
  return normal_kernel(t) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

double fat_kernel(double t, const FatNormalModel& model) {
  const double at = std::abs(t);
  if (at < model.bulk_cut) return bulk_value(model);
  if (at == 0.0 && model.eps > 0.0) {
    throw DomainError("fat density: |t|^-eps is singular at t = 0 without a bulk cut");
  }
  return std::pow(at, -model.eps) * normal_kernel(t);
}

double fat_density(double t, const FatNormalModel& model) {
  return fat_kernel(t, model) / model.normalization;
}

double fat_cdf(double t, const FatNormalModel& model) {
  const double half = fat_kernel_integral(0.0, std::min(std::abs(t), kTailCap), model) /
                      model.normalization;
  return t >= 0.0 ? 0.5 + half : 0.5 - half;
}

namespace {

struct EnvelopeMasses {
  double inside, middle, outside;
  double total() const { return inside + middle + outside; }
};

EnvelopeMasses envelope(const FatNormalModel& m) {
  const double power = 1.0 - m.eps;
  const double c = m.bulk_cut;
  return {2.0 * c * (c > 0.0 ? bulk_value(m) : 0.0),
          2.0 * (1.0 - std::pow(c, power)) / power,
          std::sqrt(2.0 * std::numbers::pi) * std::erfc(1.0 / std::numbers::sqrt2)};
}

}  // namespace

double sampler_acceptance_rate(const FatNormalModel& model) {
  return model.normalization / envelope(model).total();
}

Eigen::VectorXd sample_fat_normal(const FatNormalModel& model, long n, std::uint64_t seed) {
  check_model(model);
  if (n < 0) throw ParameterError("sample_fat_normal: n must be >= 0");
  if (sampler_acceptance_rate(model) < 0.1) {
    throw ParameterError("sample_fat_normal: acceptance rate below 10% for this eps/bulk_cut");
  }
  const EnvelopeMasses mass = envelope(model);
  const double p_inside = mass.inside / mass.total();
  const double p_middle = mass.middle / mass.total();
  const double power = 1.0 - model.eps;
  const double c_power = std::pow(model.bulk_cut, power);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd out(n);
  for (long i = 0; i < n;) {
    const double pick = uniform(rng);
    double t;
    if (pick < p_inside) {
      t = model.bulk_cut * uniform(rng);
    } else if (pick < p_inside + p_middle) {
      t = std::pow(c_power + uniform(rng) * (1.0 - c_power), 1.0 / power);
      if (uniform(rng) >= normal_kernel(t)) continue;
    } else {
      do {
        t = std::abs(normal(rng));
      } while (t < 1.0);
      if (uniform(rng) >= std::pow(t, -model.eps)) continue;
    }
    out(i++) = uniform(rng) < 0.5 ? -t : t;
  }
  return out;
}

double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& samples,
                   const FatNormalModel& model) {
  const long n = samples.size();
  if (n == 0) throw ParameterError("ks_distance: no samples");
  std::vector<double> sorted(samples.data(), samples.data() + n);
  std::sort(sorted.begin(), sorted.end());

  CompensatedSum<double> cdf;
  cdf += fat_cdf(sorted.front(), model);
  double worst = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    if (i > 0 && sorted[i] != sorted[i - 1]) {
      cdf += signed_integral(sorted[i - 1], sorted[i], model) / model.normalization;
    }
    const double F = cdf.value();
    worst = std::max({worst, std::abs(F - static_cast<double>(i) * inv_n),
                      std::abs(static_cast<double>(i + 1) * inv_n - F)});
  }
  return worst;
}

double fat_variable(double t, double eps) {
  if (!(t > 0.0)) throw ParameterError("fat_variable: t must be positive");
  return t + eps * std::log(t);
}

double fat_variable_squared(double t, double eps) {
  if (t == 0.0) throw ParameterError("fat_variable_squared: t must be nonzero");
  return t * t + eps * std::log(t * t);
}

double epsilon_of_scale(double sigma, double K) {
  if (sigma == 0.0) throw DomainError("epsilon_of_scale: pole at sigma = 0");
  return K / sigma;
}

double scale_equation_residual(double sigma, double K, double h) {
  if (!(h > 0.0)) throw ParameterError("scale_equation_residual: step must be positive");
  if (std::abs(sigma) <= h) {
    throw StencilDomainError("scale_equation_residual: stencil straddles the pole");
  }
  const auto eps = [K](double s) { return epsilon_of_scale(s, K); };
  return sigma * central_difference(eps, sigma, h) + eps(sigma);
}

}  // namespace scalefree
