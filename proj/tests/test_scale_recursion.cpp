#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "scalefree/errors.hpp"
#include "scalefree/scale_recursion.hpp"

using namespace scalefree;
using Wide = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

namespace {

// Brute-force product C / ((1 + eta0) prod_k t'_{k+}) written straight from
// the level definitions, independent of the library's trajectory code.
template <typename T>
T brute_tau_minus(const T& eta0, const std::vector<T>& eps) {
  const auto tail = [&](T eta) {
    T prod = 1;
    for (std::size_t n = 0; n < eps.size(); ++n) {
      const T alpha = 1 + eps[n];
      const T etap = eta - eps[n] / alpha;
      if (n >= 1) prod *= 1 + alpha * etap;
      eta = alpha * etap * alpha * etap;
    }
    return prod;
  };
  return tail(T(0)) / ((1 + eta0) * tail(eta0));
}

// eta_{N+1} from eta0, one step past the truncation depth.
double eta_beyond(double eta, const ScaleSchedule<double>& s) {
  for (int n = 0; n <= s.levels(); ++n) {
    const double a = s.alpha(n);
    const double x = a * (eta - s.epsilon(n) / a);
    eta = x * x;
  }
  return eta;
}

template <typename T>
std::vector<T> eps_with_zero(const ScaleSchedule<T>& s) {
  std::vector<T> e{T(0)};
  for (const auto& v : s.epsilons()) e.push_back(v);
  return e;
}

}  // namespace

TEST_CASE("schedule construction") {
  const auto g = make_schedule(0.1, ScheduleMode::geometric, 3);
  REQUIRE(g.levels() == 3);
  CHECK(g.epsilon(0) == 0.0);
  CHECK(g.epsilon(1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.epsilon(2) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.epsilon(3) == doctest::Approx(0.001).epsilon(1e-15));

  const auto z = make_schedule(0.5, ScheduleMode::zero, 4);
  for (double e : z.epsilons()) CHECK(e == 0.0);
  CHECK(z.is_trivial());

  const auto d = make_schedule(0.1, ScheduleMode::dyadic, 3);
  CHECK(d.epsilon(1) == doctest::Approx(1e-2).epsilon(1e-15));
  CHECK(d.epsilon(2) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(d.epsilon(3) == doctest::Approx(1e-8).epsilon(1e-15));

  const auto late = make_schedule(0.1, ScheduleMode::delayed, 5, 3);
  CHECK(late.epsilon(1) == 0.0);
  CHECK(late.epsilon(2) == 0.0);
  CHECK(late.epsilon(3) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(late.epsilon(4) == doctest::Approx(0.01).epsilon(1e-15));

  CHECK_THROWS_AS(make_schedule(0.0, ScheduleMode::geometric, 3), ParameterError);
  CHECK_THROWS_AS(make_schedule(1.0, ScheduleMode::geometric, 3), ParameterError);
  CHECK_THROWS_AS(make_schedule(0.1, ScheduleMode::geometric, 0), ParameterError);
  CHECK_THROWS_AS(make_schedule(0.1, ScheduleMode::delayed, 3, 0), ParameterError);
  CHECK(parse_schedule_mode("dyadic") == ScheduleMode::dyadic);
  CHECK_THROWS_AS(parse_schedule_mode("cubic"), ParameterError);
}

TEST_CASE("schedule invariants") {
  for (auto mode : {ScheduleMode::geometric, ScheduleMode::dyadic}) {
    const auto s = make_schedule(0.7, mode, 20);
    for (int n = 1; n <= s.levels(); ++n) {
      CHECK(s.epsilon(n) >= 0.0);
      CHECK(s.epsilon(n) < 1.0);
      CHECK(s.alpha(n) >= 1.0);
      CHECK(s.alpha(n) < 2.0);
      if (n > 1) CHECK(s.epsilon(n) <= s.epsilon(n - 1));
    }
  }
}

TEST_CASE("level recursion") {
  const auto zero = make_schedule(0.5, ScheduleMode::zero, 6);
  const auto l1 = advance_level(initial_level(0.1, zero), zero);
  CHECK(l1.eta == doctest::Approx(0.01).epsilon(1e-15));

  // eta_1 = 0 under geometric 0.1: eta_1' = -0.1/1.1 and eta_2 = eps_1^2.
  const auto g = make_schedule(0.1, ScheduleMode::geometric, 4);
  const auto at1 = advance_level(initial_level(0.0, g), g);
  CHECK(at1.eta == 0.0);
  CHECK(at1.eta_prime == doctest::Approx(-0.1 / 1.1).epsilon(1e-15));
  CHECK(advance_level(at1, g).eta == doctest::Approx(0.01).epsilon(1e-14));

  for (const auto& s : level_trajectory(0.0, zero)) CHECK(s.eta == 0.0);

  // eta_n = eta0^(2^n) when every eps_n vanishes; exact for a binary fraction.
  const auto traj = level_trajectory(0.5, zero);
  for (const auto& s : traj) CHECK(s.eta == std::ldexp(1.0, -(1 << s.n)));
  const auto traj3 = level_trajectory(0.3, make_schedule(0.5, ScheduleMode::zero, 4));
  for (const auto& s : traj3) {
    CHECK(s.eta == doctest::Approx(std::pow(0.3, 1 << s.n)).epsilon(1e-14));
  }

  CHECK(traj.size() == 7);
  CHECK_THROWS_AS(advance_level(traj.back(), zero), TruncationError);

  const auto s = initial_level(0.2, g);
  CHECK(s.t_minus == doctest::Approx(0.8));
  CHECK(s.t_plus_prime == doctest::Approx(1.2));
}

TEST_CASE("tau_plus is the identity on t_+") {
  CHECK(tau_plus(0.0) == 1.0);
  CHECK(tau_plus(0.25) == 1.25);
  CHECK(tau_plus(1.0) == 2.0);
  CHECK_THROWS_AS(tau_plus(-0.1), ParameterError);
}

TEST_CASE("normalization constant") {
  CHECK(normalization_constant(make_schedule(0.3, ScheduleMode::zero)) == 1.0);
  CHECK(normalization_constant(make_schedule(0.1, ScheduleMode::geometric, 1)) ==
        doctest::Approx(0.9).epsilon(1e-15));
  // 0.9 * (1 + 1.01 * 0.01 - 0.01) = 0.9 * 1.0001
  CHECK(normalization_constant(make_schedule(0.1, ScheduleMode::geometric, 2)) ==
        doctest::Approx(0.90009).epsilon(1e-15));
  // mpmath, 50 digits
  CHECK(normalization_constant(make_schedule(0.1, ScheduleMode::geometric)) ==
        doctest::Approx(0.89909091818272645446).epsilon(1e-15));
  CHECK(normalization_constant(make_schedule(0.3, ScheduleMode::dyadic)) ==
        doctest::Approx(0.91).epsilon(1e-15));
}

TEST_CASE("tau_minus values") {
  for (auto mode : {ScheduleMode::geometric, ScheduleMode::dyadic, ScheduleMode::zero,
                    ScheduleMode::delayed}) {
    for (double e1 : {1e-4, 0.01, 0.1, 0.5, 0.9}) {
      CHECK(tau_minus(0.0, make_schedule(e1, mode, 24, 3)).value == 1.0);
    }
  }

  // Telescoping: prod_{n=0..3} (1 + x^{2^n}) = (1 - x^16) / (1 - x).
  const auto zero3 = make_schedule(0.5, ScheduleMode::zero, 3);
  const double expected = 0.5 / (1.0 - std::pow(0.5, 16));
  CHECK(tau_minus(0.5, zero3).value == doctest::Approx(expected).epsilon(1e-15));
  CHECK(tau_minus(0.5, zero3).value ==
        doctest::Approx(0.50000762951094834821).epsilon(1e-15));

  const auto g8 = make_schedule(0.1, ScheduleMode::geometric, 8);
  const auto e = tau_minus(0.1, g8);
  CHECK(e.factors.size() == 9);
  CHECK(e.factors.front() == doctest::Approx(1.0 / 1.1));
  // mpmath: 0.9 + 2.2703470798454869e-37
  CHECK(e.value == doctest::Approx(0.9).epsilon(2e-16));

  // The same schedule at 256 bits resolves the deviation from t_-.
  const auto wide = make_schedule(Wide("0.1"), ScheduleMode::geometric, 8);
  const Wide deviation = tau_minus(Wide("0.1"), wide).value - Wide("0.9");
  CHECK(static_cast<double>(deviation) ==
        doctest::Approx(2.2703470798454869e-37).epsilon(1e-15));
  CHECK(static_cast<double>(abs(tau_minus(Wide("0.1"), wide).value -
                                brute_tau_minus(Wide("0.1"), eps_with_zero(wide)))) < 1e-70);

  CHECK_THROWS_AS(tau_minus(1.0, g8), ParameterError);
  CHECK_THROWS_AS(tau_minus(-0.1, g8), ParameterError);
}

TEST_CASE("tau_minus matches the brute-force product and the telescoped form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ScheduleMode modes[] = {ScheduleMode::geometric, ScheduleMode::dyadic,
                                ScheduleMode::delayed};
  for (int trial = 0; trial < 200; ++trial) {
    const auto mode = modes[trial % 3];
    const double e1 = 0.01 + 0.5 * u(rng);
    const int depth = 1 + trial % 6;
    const double eta0 = 0.9 * u(rng);
    const auto s = make_schedule(e1, mode, depth, 2);
    const double value = tau_minus(eta0, s).value;

    const Wide brute = brute_tau_minus(Wide(eta0), eps_with_zero(make_schedule(
                                                       Wide(e1), mode, depth, 2)));
    CHECK(value == doctest::Approx(static_cast<double>(brute)).epsilon(1e-13));

    // t'_{n+} t'_{n-} = 1 - eta_{n+1} with t'_{n-} = alpha_n t_{n-} collapses the
    // product to t_- (1 - eta_{N+1}(0)) / (1 - eta_{N+1}(eta0)).
    const double telescoped =
        (1.0 - eta0) * (1.0 - eta_beyond(0.0, s)) / (1.0 - eta_beyond(eta0, s));
    CHECK(value == doctest::Approx(telescoped).epsilon(1e-13));
  }
}

TEST_CASE("factor decomposition converges") {
  const auto e = tau_minus(0.1, make_schedule(0.1, ScheduleMode::geometric));
  CHECK(e.truncation_depth == 24);
  for (std::size_t k = 2; k < e.factors.size(); ++k) {
    CHECK(std::abs(e.factors[k] - 1.0) <= std::abs(e.factors[k - 1] - 1.0));
  }
  double product = e.normalization;
  for (double f : e.factors) product *= f;
  CHECK(product == doctest::Approx(e.value).epsilon(1e-15));
}

TEST_CASE("continuity and slope matching at t = 1") {
  for (double e1 : {1e-3, 1e-4}) {
    const auto [left, right] = one_sided_slopes(make_schedule(e1, ScheduleMode::geometric),
                                                kDefaultFirstDerivativeStep);
    CHECK(std::abs(left - 1.0) < 1e-3);
    CHECK(std::abs(right - 1.0) < 1e-3);
  }
}

TEST_CASE("parity") {
  const auto zero = make_schedule(0.1, ScheduleMode::zero);
  for (double eta : {0.0, 0.05, 0.1, 0.3, 0.6}) {
    CHECK(parity_violation(eta, zero) <= 1e-15);
  }

  const auto g = make_schedule(0.1, ScheduleMode::geometric);
  const auto m = tau_minus(0.1, g);
  const auto p = evaluate_plus(0.1);
  const auto [pm, pp] = parity_transform(m, p);
  CHECK(pm.branch == Branch::minus);
  CHECK(pp.branch == Branch::plus);
  CHECK(pm.value == doctest::Approx(0.9));
  CHECK(pp.value == doctest::Approx(m.normalization / (0.9 * m.tail_product)));
  const auto [back_m, back_p] = parity_transform(pm, pp);
  CHECK(back_m.value == m.value);
  CHECK(back_p.value == p.value);
  CHECK(back_m.branch == Branch::minus);
  CHECK(back_m.orientation == 1);

  CHECK(parity_violation(0.0, g) == 0.0);
  CHECK_THROWS_AS(parity_transform(tau_minus(0.1, g), evaluate_plus(0.2)), ParameterError);

  // One nonzero level keeps a visible violation. mpmath: 1.886039317433e-3
  // on the minus branch, 2.305159165752e-3 on the plus branch.
  CHECK(parity_violation(0.1, make_schedule(0.1, ScheduleMode::geometric, 1)) ==
        doctest::Approx(2.305159165751920966e-3).epsilon(1e-12));
  CHECK(std::abs(tau_minus(0.1, make_schedule(0.1, ScheduleMode::geometric, 1)).value - 0.9) ==
        doctest::Approx(1.886039317433389881e-3).epsilon(1e-12));
  // At full depth it shrinks to ~eps_N^2: below binary64 resolution, but
  // nonzero at 256 bits.
  CHECK(parity_violation(0.1, g) < 1e-15);
  const Wide wide = parity_violation(Wide("0.1"), make_schedule(Wide("0.1"),
                                                                ScheduleMode::geometric));
  CHECK(wide > 0);
  CHECK(wide < Wide("1e-40"));
}

TEST_CASE("time-symmetric solution") {
  const auto g1 = make_schedule(0.1, ScheduleMode::geometric);
  const auto center = tau_symmetric(0.0, g1, g1);
  CHECK(center.minus == 1.0);
  CHECK(center.plus == 1.0);

  // f = prod_{k>=1} 1/(1 + 0.2^(2^k)); mpmath gives f/1.2 = 0.8, f/0.8 = 1.2.
  const auto zero = make_schedule(0.5, ScheduleMode::zero);
  const auto pair = tau_symmetric(0.2, zero, zero);
  CHECK(pair.minus == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(pair.plus == doctest::Approx(1.2).epsilon(1e-15));

  // Reflecting eta0 and swapping the schedules mirrors the pair exactly;
  // distinct shallow schedules break the mirror at fixed schedules.
  const auto a = make_schedule(0.1, ScheduleMode::geometric, 1);
  const auto b = make_schedule(0.2, ScheduleMode::geometric, 1);
  const auto ab = tau_symmetric(0.2, a, b);
  const auto swapped = tau_symmetric(-0.2, b, a);
  CHECK(ab.minus == doctest::Approx(swapped.plus).epsilon(1e-15));
  CHECK(ab.plus == doctest::Approx(swapped.minus).epsilon(1e-15));
  const auto reflected = tau_symmetric(-0.2, a, b);
  CHECK(std::abs(ab.minus - reflected.plus) > 1e-4);
  const auto aa = tau_symmetric(0.2, a, a);
  const auto aa_mirror = tau_symmetric(-0.2, a, a);
  CHECK(aa.minus == doctest::Approx(aa_mirror.plus).epsilon(1e-15));

  CHECK_THROWS_AS(tau_symmetric(1.0, g1, g1), DomainError);
  CHECK_THROWS_AS(tau_symmetric(-1.0, g1, g1), DomainError);
}

TEST_CASE("rescaled evaluation and the general solution") {
  const auto zero = make_schedule(0.5, ScheduleMode::zero);
  for (double t : {0.7, 1.0, 3.3, 12.0}) {
    CHECK(tau_rescaled(t, zero) == doctest::Approx(t).epsilon(1e-14));
    for (auto form : {GeneralForm::reciprocal, GeneralForm::direct}) {
      CHECK(tau_general(t, 0.01, zero, form) == doctest::Approx(2.0 * t).epsilon(1e-13));
    }
  }
  const auto g = make_schedule(0.1, ScheduleMode::geometric);
  // t1 = 0.01: t1 tau(100) = 0.01 * 100 * tau_+(0) = 1.
  CHECK(tau_general(1.0, 0.01, g, GeneralForm::reciprocal) == doctest::Approx(2.0).epsilon(1e-15));

  for (const auto& s : {zero, g}) {
    for (auto form : {GeneralForm::reciprocal, GeneralForm::direct}) {
      const double h = 1e-4;
      const double r = general_phi_residual(1.0, 0.01, s, form, h);
      CHECK(std::abs(r) <= std::max(10 * h * h, 10 * 0.1 * 0.1));
    }
  }

  CHECK(parse_general_form("direct") == GeneralForm::direct);
  CHECK_THROWS_AS(parse_general_form("other"), ParameterError);
  CHECK_THROWS_AS(tau_general(-1.0, 0.01, g, GeneralForm::reciprocal), ParameterError);
  CHECK_THROWS_AS(tau_general(1.0, 1.5, g, GeneralForm::reciprocal), ParameterError);
  CHECK_THROWS_AS(tau_general(0.001, 0.01, g, GeneralForm::direct), DomainError);
  CHECK_THROWS_AS(tau_rescaled(0.3, g), DomainError);
}

TEST_CASE("ode residual") {
  const auto standard = SolutionBranch<double>::standard();
  for (double t : {0.3, 1.0, 7.5}) {
    // tau = t is exact for the stencil; only rounding of t +- h remains.
    for (double h : {1e-2, 1e-4}) {
      CHECK(std::abs(ode_residual(standard, t, h)) <= 4.0 * 0x1p-53 * t * t / h + 1e-15);
    }
  }
  CHECK(std::abs(ode_residual(SolutionBranch<double>::plus(), 1.3, 1e-6)) < 1e-9);

  // The left branch agrees with t to rounding at full depth, so the residual
  // is rounding noise rather than O(eps_1).
  const auto minus = SolutionBranch<double>::minus(make_schedule(0.1, ScheduleMode::geometric));
  CHECK(std::abs(ode_residual(minus, 0.9, 1e-4)) < 1e-10);

  CHECK_THROWS_AS(ode_residual(minus, 1.0, 1e-4), StencilDomainError);
  CHECK_THROWS_AS(ode_residual(SolutionBranch<double>::plus(), 1.0, 1e-4), StencilDomainError);
  CHECK_THROWS_AS(ode_residual(standard, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(minus(1.2), DomainError);
}

TEST_CASE("second-derivative jump and leading deviation") {
  // Rounding in the second difference is about 4 u / h^2.
  const double u = std::numeric_limits<double>::epsilon();
  for (auto mode : {ScheduleMode::zero, ScheduleMode::geometric, ScheduleMode::delayed}) {
    const auto s = make_schedule(0.1, mode, 24, 3);
    for (const auto& [h, jump] : jump_sweep(s, std::vector<double>{1e-2, 1e-3, 1e-4})) {
      CHECK(jump <= 16 * u / (h * h));
    }
  }
  const auto g = make_schedule(0.1, ScheduleMode::geometric);
  CHECK_THROWS_AS(second_derivative_jump(g, 1e-6), IllConditionedError);
  CHECK_THROWS_AS(second_derivative_jump(g, 0.3), ParameterError);
  CHECK_THROWS_AS(second_derivative_jump(g, 0.0), ParameterError);

  // Shallow schedules expose the order of the first discontinuous term
  // (mpmath at probe 0.05). Tolerances follow from the binary64 rounding of
  // tau_-/t_- - 1, about 1e-16 against deviations of 2e-7 and 9e-12.
  const auto shallow = leading_deviation(make_schedule(0.1, ScheduleMode::geometric, 2));
  REQUIRE(shallow.detected);
  CHECK(shallow.order == doctest::Approx(4.3876198922857867).epsilon(1e-8));
  CHECK(shallow.coefficient == doctest::Approx(0.097387471339592001).epsilon(1e-7));

  const auto late = leading_deviation(make_schedule(0.1, ScheduleMode::delayed, 3, 3));
  REQUIRE(late.detected);
  CHECK(late.order == doctest::Approx(7.9999999177682592).epsilon(1e-5));
  CHECK(late.coefficient == doctest::Approx(-0.22222216742938360).epsilon(1e-3));

  CHECK_FALSE(leading_deviation(make_schedule(0.1, ScheduleMode::zero)).detected);
  CHECK_FALSE(leading_deviation(g).detected);
}
