#pragma once

// One-sided inversion cascade x -> 1/(1 + x). Started from the saturation
// value x = 1 its iterates are the convergents F_k / F_{k+1} of the golden
// mean continued fraction [0; 1, 1, 1, ...].

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "scalefree/errors.hpp"

namespace scalefree {

/// nu = (sqrt 5 - 1) / 2, the positive root of nu^2 + nu = 1.
template <typename Scalar = double>
Scalar golden_mean() {
  using std::sqrt;
  return (sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
}

template <typename Scalar>
Scalar cascade_step(const Scalar& x) {
  if (!(x > 0 && x <= 1)) throw ParameterError("cascade_step: x must lie in (0, 1]");
  return Scalar(1) / (Scalar(1) + x);
}

template <typename Scalar = double>
struct InversionEvent {
  int level = 0;
  Scalar pre_inversion_value{0};
  Scalar post_inversion_value{0};
};

template <typename Scalar = double>
struct CascadeTrace {
  std::vector<InversionEvent<Scalar>> events;
  std::vector<Scalar> approximants;
  // Running scale variable during the growth phases, only filled when
  // growth_steps > 0. Entry j of level k is pre_k * j / growth_steps.
  std::vector<Scalar> growth_path;
  int depth = 0;
};

struct CascadeOptions {
  int growth_steps = 0;   // linear steps inserted before each inversion
  double jitter = 0.0;    // saturation threshold drawn from [1 - jitter, 1]
  std::uint64_t seed = 0;
};

template <typename Scalar>
CascadeTrace<Scalar> cascade_run(const Scalar& x0, int depth,
                                 const CascadeOptions& options = {}) {
  if (depth < 1) throw ParameterError("cascade_run: depth must be >= 1");
  if (!(x0 > 0 && x0 <= 1)) throw ParameterError("cascade_run: x0 must lie in (0, 1]");
  if (options.growth_steps < 0) throw ParameterError("cascade_run: growth_steps < 0");
  if (!(options.jitter >= 0.0 && options.jitter < 1.0)) {
    throw ParameterError("cascade_run: jitter must lie in [0, 1)");
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  CascadeTrace<Scalar> trace;
  trace.depth = depth;
  trace.events.reserve(static_cast<std::size_t>(depth));
  trace.approximants.reserve(static_cast<std::size_t>(depth));

  // Without jitter the orbit of x0 = 1 is the Fibonacci ratio F_k / F_{k+1};
  // it is carried as an integer pair and divided once per level, so each
  // approximant is the correctly rounded rational while both fit in 53 bits.
  const bool exact_orbit = options.jitter == 0.0 && x0 == Scalar(1);
  std::uint64_t num = 1, den = 1;
  constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;

  Scalar x = x0;
  for (int level = 1; level <= depth; ++level) {
    Scalar pre = x;
    if (options.jitter > 0.0) pre = x * Scalar(1.0 - options.jitter * uniform(rng));
    for (int j = 1; j <= options.growth_steps; ++j) {
      trace.growth_path.push_back(pre * Scalar(j) / Scalar(options.growth_steps));
    }
    Scalar post = cascade_step(pre);
    if (exact_orbit && num + den < kExactLimit) {
      const std::uint64_t next = num + den;
      num = den;
      den = next;
      post = Scalar(num) / Scalar(den);
    }
    trace.events.push_back({level, pre, post});
    trace.approximants.push_back(post);
    x = post;
  }
  return trace;
}

/// nu^(2 depth) / (1 - nu^2): bound on |x_depth - nu| for x0 = 1.
template <typename Scalar = double>
Scalar cascade_error_bound(int depth) {
  using std::pow;
  const Scalar nu = golden_mean<Scalar>();
  return pow(nu, 2 * depth) / (Scalar(1) - nu * nu);
}

}  // namespace scalefree
