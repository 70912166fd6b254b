#pragma once

// Multi-scale recursive solutions of the scale-free equation t dtau/dt = tau
// built in the neighbourhood of t = 1.
//
// Notation: t_{n-} = 1 - eta_n, alpha_n = 1 + eps_n, eta_n' = eta_n - eps_n /
// alpha_n, t'_{n+} = 1 + alpha_n eta_n', eta_{n+1} = alpha_n^2 eta_n'^2, with
// eps_0 = 0 so that t'_{0+} = t_+ = 1 + eta_0. The nontrivial left branch is
//
//   tau_-(eta_0) = C / (t'_{0+} t'_{1+} ... t'_{N+}),   C = prod_k t'_{k+}(0),
//
// closed at depth N with f_{N-} = 1. The right branch is tau_+ = t_+.
//
// Everything here is templated on the scalar so the same code runs in binary64
// and in a multiprecision type when frozen constants are generated.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "scalefree/errors.hpp"

namespace scalefree {

enum class ScheduleMode { geometric, dyadic, zero, delayed };

inline std::string to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::geometric: return "geometric";
    case ScheduleMode::dyadic: return "dyadic";
    case ScheduleMode::zero: return "zero";
    case ScheduleMode::delayed: return "delayed";
  }
  return "unknown";
}

inline ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "geometric") return ScheduleMode::geometric;
  if (name == "dyadic") return ScheduleMode::dyadic;
  if (name == "zero") return ScheduleMode::zero;
  if (name == "delayed") return ScheduleMode::delayed;
  throw ParameterError("unknown schedule mode '" + name + "'");
}

inline constexpr int kDefaultLevels = 24;

/// The scaling parameters eps_1..eps_N of one recursion and its depth N.
/// eps_0 is always zero.
template <typename Scalar = double>
class ScaleSchedule {
 public:
  ScaleSchedule(Scalar epsilon1, ScheduleMode mode, int n_levels,
                int first_level = 1)
      : epsilon1_(epsilon1), mode_(mode), first_level_(first_level) {
    if (!(epsilon1 > 0 && epsilon1 < 1)) {
      throw ParameterError("schedule: epsilon1 must lie in (0, 1)");
    }
    if (n_levels < 1) {
      throw ParameterError("schedule: n_levels must be at least 1");
    }
    if (first_level < 1) {
      throw ParameterError("schedule: delayed start level must be >= 1");
    }
    using std::pow;
    eps_.assign(static_cast<std::size_t>(n_levels) + 1, Scalar(0));
    Scalar squared = epsilon1;
    for (int n = 1; n <= n_levels; ++n) {
      switch (mode) {
        case ScheduleMode::geometric:
          eps_[n] = pow(epsilon1, n);
          break;
        case ScheduleMode::dyadic:
          squared = squared * squared;  // epsilon1^(2^n)
          eps_[n] = squared;
          break;
        case ScheduleMode::zero:
          break;
        case ScheduleMode::delayed:
          if (n >= first_level) eps_[n] = pow(epsilon1, n - first_level + 1);
          break;
      }
    }
  }

  int levels() const { return static_cast<int>(eps_.size()) - 1; }
  ScheduleMode mode() const { return mode_; }
  const Scalar& epsilon1() const { return epsilon1_; }
  int first_level() const { return first_level_; }

  /// eps_n for 0 <= n <= N.
  const Scalar& epsilon(int n) const { return eps_.at(static_cast<std::size_t>(n)); }
  Scalar alpha(int n) const { return Scalar(1) + epsilon(n); }

  /// eps_1..eps_N.
  std::vector<Scalar> epsilons() const { return {eps_.begin() + 1, eps_.end()}; }

  bool is_trivial() const {
    for (const auto& e : eps_) {
      if (e != 0) return false;
    }
    return true;
  }

 private:
  Scalar epsilon1_;
  ScheduleMode mode_;
  int first_level_;
  std::vector<Scalar> eps_;
};

template <typename Scalar>
ScaleSchedule<Scalar> make_schedule(Scalar epsilon1, ScheduleMode mode,
                                    int n_levels = kDefaultLevels,
                                    int first_level = 1) {
  return ScaleSchedule<Scalar>(epsilon1, mode, n_levels, first_level);
}

template <typename Scalar = double>
struct LevelState {
  int n = 0;
  Scalar eta{0};
  Scalar eta_prime{0};
  Scalar t_minus{1};
  Scalar t_plus_prime{1};
};

namespace detail {

template <typename Scalar>
LevelState<Scalar> fill_level(int n, const Scalar& eta,
                              const ScaleSchedule<Scalar>& schedule) {
  LevelState<Scalar> s;
  s.n = n;
  s.eta = eta;
  const Scalar alpha = schedule.alpha(n);
  s.eta_prime = eta - schedule.epsilon(n) / alpha;
  s.t_minus = Scalar(1) - eta;
  s.t_plus_prime = Scalar(1) + alpha * s.eta_prime;
  return s;
}

}  // namespace detail

/// Level 0 of the recursion. Negative eta0 is accepted here because the
/// symmetric and reflected branches evaluate the mirrored point.
template <typename Scalar>
LevelState<Scalar> initial_level(const Scalar& eta0,
                                 const ScaleSchedule<Scalar>& schedule) {
  return detail::fill_level(0, eta0, schedule);
}

/// One step n -> n+1: eta_{n+1} = alpha_n^2 eta_n'^2.
template <typename Scalar>
LevelState<Scalar> advance_level(const LevelState<Scalar>& state,
                                 const ScaleSchedule<Scalar>& schedule) {
  if (state.n >= schedule.levels()) {
    throw TruncationError("advance_level: level " + std::to_string(state.n + 1) +
                          " exceeds truncation depth " +
                          std::to_string(schedule.levels()));
  }
  const Scalar alpha = schedule.alpha(state.n);
  const Scalar scaled = alpha * state.eta_prime;
  return detail::fill_level(state.n + 1, scaled * scaled, schedule);
}

/// Levels 0..N starting from eta0.
template <typename Scalar>
std::vector<LevelState<Scalar>> level_trajectory(
    const Scalar& eta0, const ScaleSchedule<Scalar>& schedule) {
  std::vector<LevelState<Scalar>> levels;
  levels.reserve(static_cast<std::size_t>(schedule.levels()) + 1);
  levels.push_back(initial_level(eta0, schedule));
  while (levels.back().n < schedule.levels()) {
    levels.push_back(advance_level(levels.back(), schedule));
  }
  return levels;
}

enum class Branch { minus, plus };

inline Branch flip(Branch b) { return b == Branch::minus ? Branch::plus : Branch::minus; }

/// A branch value together with its level decomposition.
///
/// Two forms occur. The product form carries `factors` = 1/t'_{k+} for
/// k = 0..N, value = C / ((1 + orientation * eta0) * tail_product) with
/// tail_product = t'_{1+}...t'_{N+}. The linear form (the branch tau = t_+ and
/// its mirror t_-) has no factors and value = 1 + orientation * eta0.
/// `orientation` is +1 for the branch as constructed and -1 after a
/// reflection eta -> -eta of the leading scale.
template <typename Scalar = double>
struct TauEvaluation {
  Branch branch = Branch::minus;
  Scalar eta0{0};
  int orientation = 1;
  Scalar value{1};
  std::vector<Scalar> factors;
  Scalar tail_product{1};
  Scalar normalization{1};
  int truncation_depth = 0;

  bool is_linear() const { return factors.empty(); }
};

namespace detail {

// t'_{1+} ... t'_{N+} along the trajectory of eta0, multiplied left to right.
template <typename Scalar>
Scalar tail_product(const Scalar& eta0, const ScaleSchedule<Scalar>& schedule,
                    std::vector<Scalar>* factors) {
  const auto levels = level_trajectory(eta0, schedule);
  Scalar product(1);
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const Scalar& tp = levels[k].t_plus_prime;
    if (!(tp > 0)) {
      throw DomainError("tau: non-positive level factor t'_{" +
                        std::to_string(k) + "+}");
    }
    product *= tp;
    if (factors) factors->push_back(Scalar(1) / tp);
  }
  return product;
}

template <typename Scalar>
Scalar product_value(const Scalar& normalization, const Scalar& eta0,
                     int orientation, const Scalar& tail) {
  const Scalar lead = Scalar(1) + Scalar(orientation) * eta0;
  if (!(lead > 0)) throw DomainError("tau: pole of the leading factor");
  return normalization / (lead * tail);
}

}  // namespace detail

/// C = t'_{1+}(0) t'_{2+}(0) ... t'_{N+}(0); makes tau_-(0) = 1.
template <typename Scalar>
Scalar normalization_constant(const ScaleSchedule<Scalar>& schedule) {
  return detail::tail_product(Scalar(0), schedule, static_cast<std::vector<Scalar>*>(nullptr));
}

template <typename Scalar>
TauEvaluation<Scalar> tau_minus(const Scalar& eta0,
                                const ScaleSchedule<Scalar>& schedule) {
  if (!(eta0 >= 0 && eta0 < 1)) {
    throw ParameterError("tau_minus: eta0 must lie in [0, 1)");
  }
  TauEvaluation<Scalar> e;
  e.branch = Branch::minus;
  e.eta0 = eta0;
  e.truncation_depth = schedule.levels();
  e.factors.push_back(Scalar(1) / (Scalar(1) + eta0));
  e.tail_product = detail::tail_product(eta0, schedule, &e.factors);
  e.normalization = normalization_constant(schedule);
  e.value = detail::product_value(e.normalization, eta0, 1, e.tail_product);
  return e;
}

template <typename Scalar>
Scalar tau_plus(const Scalar& eta0) {
  if (!(eta0 >= 0)) throw ParameterError("tau_plus: eta0 must be >= 0");
  return Scalar(1) + eta0;
}

/// tau_+ wrapped as an evaluation (linear form) so it can be reflected.
template <typename Scalar>
TauEvaluation<Scalar> evaluate_plus(const Scalar& eta0, int truncation_depth = 0) {
  TauEvaluation<Scalar> e;
  e.branch = Branch::plus;
  e.eta0 = eta0;
  e.value = tau_plus(eta0);
  e.truncation_depth = truncation_depth;
  return e;
}

/// Mirror of one evaluation under P: eta -> -eta at the leading scale. The
/// deeper scales only see eta0^2 and are unchanged.
template <typename Scalar>
TauEvaluation<Scalar> reflect(const TauEvaluation<Scalar>& e) {
  TauEvaluation<Scalar> r = e;
  r.branch = flip(e.branch);
  r.orientation = -e.orientation;
  const Scalar lead = Scalar(1) + Scalar(r.orientation) * e.eta0;
  if (e.is_linear()) {
    r.value = lead;
  } else {
    r.factors.front() = Scalar(1) / lead;
    r.value = detail::product_value(e.normalization, e.eta0, r.orientation,
                                    e.tail_product);
  }
  return r;
}

/// (tau^P_-, tau^P_+) = (P tau_+, P tau_-).
template <typename Scalar>
std::pair<TauEvaluation<Scalar>, TauEvaluation<Scalar>> parity_transform(
    const TauEvaluation<Scalar>& eval_minus, const TauEvaluation<Scalar>& eval_plus) {
  if (eval_minus.eta0 != eval_plus.eta0) {
    throw ParameterError("parity_transform: branches evaluated at different eta0");
  }
  return {reflect(eval_plus), reflect(eval_minus)};
}

/// Largest |tau^P - tau| over the two branches.
template <typename Scalar>
Scalar parity_violation(const Scalar& eta0, const ScaleSchedule<Scalar>& schedule) {
  using std::abs;
  using std::max;
  const auto m = tau_minus(eta0, schedule);
  const auto p = evaluate_plus(eta0, schedule.levels());
  const auto [pm, pp] = parity_transform(m, p);
  return max(abs(pm.value - m.value), abs(pp.value - p.value));
}

template <typename Scalar = double>
struct SymmetricPair {
  Scalar minus{1};
  Scalar plus{1};
};

/// Time-symmetric fluctuating solution: tau'_- = C_-/(t_+ F_-(eta0)),
/// tau'_+ = C_+/(t_- F_+(eta0)), each branch normalized by its own schedule.
/// Equal schedules give a reflection-symmetric pair.
template <typename Scalar>
SymmetricPair<Scalar> tau_symmetric(const Scalar& eta0,
                                    const ScaleSchedule<Scalar>& schedule_minus,
                                    const ScaleSchedule<Scalar>& schedule_plus) {
  using std::abs;
  if (!(abs(eta0) < 1)) {
    throw DomainError("tau_symmetric: |eta0| must be < 1 (pole in 1/t_-+)");
  }
  const Scalar tail_m = detail::tail_product(eta0, schedule_minus, static_cast<std::vector<Scalar>*>(nullptr));
  const Scalar tail_p = detail::tail_product(eta0, schedule_plus, static_cast<std::vector<Scalar>*>(nullptr));
  return {detail::product_value(normalization_constant(schedule_minus), eta0, 1, tail_m),
          detail::product_value(normalization_constant(schedule_plus), eta0, -1, tail_p)};
}

/// tau(s) for arbitrary s > 0 through the scale invariance tau(s) = t0
/// tau(s / t0), anchor t0 = round(s). s / t0 <= 1 uses the left branch.
template <typename Scalar>
Scalar tau_rescaled(const Scalar& s, const ScaleSchedule<Scalar>& schedule) {
  using std::floor;
  if (!(s > 0)) throw DomainError("tau: argument must be positive");
  const Scalar anchor = floor(s + Scalar(0.5));
  if (anchor < 1) {
    throw DomainError("tau: argument below 1/2 has no anchor in the implemented neighbourhood");
  }
  const Scalar r = s / anchor;
  if (r < 1) return anchor * tau_minus(Scalar(1) - r, schedule).value;
  return anchor * tau_plus(r - Scalar(1));
}

/// Two forms of phi in tau_g = t (1 + phi).
enum class GeneralForm {
  reciprocal,  // phi = t1 tau(1/t1), t1 = eps t
  direct,      // phi = eps t^-1 tau(t1), t1 = t / eps
};

inline GeneralForm parse_general_form(const std::string& name) {
  if (name == "reciprocal") return GeneralForm::reciprocal;
  if (name == "direct") return GeneralForm::direct;
  throw ParameterError("unknown general-solution form '" + name + "'");
}

inline std::string to_string(GeneralForm form) {
  return form == GeneralForm::reciprocal ? "reciprocal" : "direct";
}

template <typename Scalar>
Scalar general_phi(const Scalar& t, const Scalar& epsilon,
                   const ScaleSchedule<Scalar>& schedule, GeneralForm form) {
  if (!(t > 0)) throw ParameterError("tau_general: t must be positive");
  if (!(epsilon > 0 && epsilon < 1)) {
    throw ParameterError("tau_general: epsilon must lie in (0, 1)");
  }
  if (form == GeneralForm::direct) {
    return epsilon / t * tau_rescaled(t / epsilon, schedule);
  }
  const Scalar t1 = epsilon * t;
  return t1 * tau_rescaled(Scalar(1) / t1, schedule);
}

template <typename Scalar>
Scalar tau_general(const Scalar& t, const Scalar& epsilon,
                   const ScaleSchedule<Scalar>& schedule, GeneralForm form) {
  return t * (Scalar(1) + general_phi(t, epsilon, schedule, form));
}

/// t dphi/dt by central differences; zero for an exact solution.
template <typename Scalar>
Scalar general_phi_residual(const Scalar& t, const Scalar& epsilon,
                            const ScaleSchedule<Scalar>& schedule, GeneralForm form,
                            const Scalar& h) {
  const Scalar up = general_phi(t + h, epsilon, schedule, form);
  const Scalar down = general_phi(t - h, epsilon, schedule, form);
  return t * (up - down) / (Scalar(2) * h);
}

/// A solution branch viewed as a function of t on its domain.
template <typename Scalar = double>
class SolutionBranch {
 public:
  enum class Kind { standard, minus, plus };

  static SolutionBranch standard() { return SolutionBranch(Kind::standard, {}); }
  static SolutionBranch plus() { return SolutionBranch(Kind::plus, {}); }
  static SolutionBranch minus(const ScaleSchedule<Scalar>& schedule) {
    return SolutionBranch(Kind::minus, {schedule});
  }

  Kind kind() const { return kind_; }

  /// Closed domain [lower, upper]; the lower end is open for the standard and
  /// minus branches (t > 0).
  Scalar lower() const { return kind_ == Kind::plus ? Scalar(1) : Scalar(0); }
  Scalar upper() const {
    return kind_ == Kind::minus ? Scalar(1) : std::numeric_limits<double>::infinity();
  }

  bool contains(const Scalar& t) const {
    if (kind_ == Kind::plus) return t >= 1;
    if (kind_ == Kind::minus) return t > 0 && t <= 1;
    return t > 0;
  }

  Scalar operator()(const Scalar& t) const {
    if (!contains(t)) throw DomainError("branch evaluated outside its domain");
    switch (kind_) {
      case Kind::standard: return t;
      case Kind::plus: return tau_plus(t - Scalar(1));
      case Kind::minus: return tau_minus(Scalar(1) - t, schedule_.front()).value;
    }
    return t;
  }

 private:
  SolutionBranch(Kind kind, std::vector<ScaleSchedule<Scalar>> schedule)
      : kind_(kind), schedule_(std::move(schedule)) {}

  Kind kind_;
  std::vector<ScaleSchedule<Scalar>> schedule_;  // one entry for Kind::minus
};

/// t (tau(t+h) - tau(t-h)) / 2h - tau(t); zero for an exact solution.
template <typename Scalar>
Scalar ode_residual(const SolutionBranch<Scalar>& branch, const Scalar& t,
                    const Scalar& h) {
  if (!(h > 0)) throw ParameterError("ode_residual: step must be positive");
  if (!branch.contains(t - h) || !branch.contains(t + h)) {
    throw StencilDomainError(
        "ode_residual: stencil crosses the branch boundary; evaluate one-sided");
  }
  return t * (branch(t + h) - branch(t - h)) / (Scalar(2) * h) - branch(t);
}

inline constexpr double kDefaultFirstDerivativeStep = 1e-4;
inline constexpr double kDefaultJumpStep = 1e-3;
// Below this the rounding term ~4 u / h^2 of a second difference exceeds 1e-6.
inline constexpr double kMinJumpStep = 1e-5;

/// One-sided first difference quotients of both branches at t = 1.
template <typename Scalar>
std::pair<Scalar, Scalar> one_sided_slopes(const ScaleSchedule<Scalar>& schedule,
                                           const Scalar& h) {
  const Scalar left = (tau_minus(Scalar(0), schedule).value -
                       tau_minus(h, schedule).value) / h;
  const Scalar right = (tau_plus(h) - tau_plus(Scalar(0))) / h;
  return {left, right};
}

/// |tau''_+(1+) - tau''_-(1-)| from one-sided second differences.
template <typename Scalar>
Scalar second_derivative_jump(const ScaleSchedule<Scalar>& schedule, const Scalar& h) {
  using std::abs;
  if (!(h > 0) || !(2 * h < Scalar(0.5))) {
    throw ParameterError("second_derivative_jump: need 0 < 2h < 1/2");
  }
  if (h < Scalar(kMinJumpStep)) {
    throw IllConditionedError("second_derivative_jump: step below rounding floor");
  }
  const auto minus = [&](const Scalar& eta) { return tau_minus(eta, schedule).value; };
  const Scalar left = (minus(Scalar(0)) - 2 * minus(h) + minus(2 * h)) / (h * h);
  const Scalar right =
      (tau_plus(2 * h) - 2 * tau_plus(h) + tau_plus(Scalar(0))) / (h * h);
  return abs(right - left);
}

template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> jump_sweep(const ScaleSchedule<Scalar>& schedule,
                                                  const std::vector<Scalar>& steps) {
  std::vector<std::pair<Scalar, Scalar>> out;
  out.reserve(steps.size());
  for (const auto& h : steps) out.emplace_back(h, second_derivative_jump(schedule, h));
  return out;
}

template <typename Scalar = double>
struct LeadingDeviation {
  bool detected = false;
  Scalar order{0};        // m in tau_-/t_- - 1 ~ c eta^m
  Scalar coefficient{0};  // c
};

/// Order of the first derivative at which the left branch departs from the
/// smooth continuation t_-. Because tau_+ = t_+ exactly, this is the order of
/// the first discontinuous derivative at t = 1 (2 for a schedule with
/// eps_1 != 0, 2^n0 when the first nonzero level is n0).
template <typename Scalar>
LeadingDeviation<Scalar> leading_deviation(const ScaleSchedule<Scalar>& schedule,
                                           const Scalar& probe = Scalar(0.05),
                                           const Scalar& floor = Scalar(1e-13)) {
  using std::abs;
  using std::log;
  using std::pow;
  const auto deviation = [&](const Scalar& eta) {
    return tau_minus(eta, schedule).value / (Scalar(1) - eta) - Scalar(1);
  };
  const Scalar d1 = deviation(probe);
  const Scalar d2 = deviation(2 * probe);
  LeadingDeviation<Scalar> out;
  if (abs(d1) <= floor || abs(d2) <= floor) return out;
  out.detected = true;
  out.order = log(abs(d2 / d1)) / log(Scalar(2));
  out.coefficient = d1 / pow(probe, out.order);
  return out;
}

}  // namespace scalefree
