#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "scalefree/errors.hpp"
#include "scalefree/experiments.hpp"
#include "scalefree/fat_tails.hpp"
#include "scalefree/golden_cascade.hpp"
#include "scalefree/logistic_edge.hpp"
#include "scalefree/pink_noise.hpp"
#include "scalefree/scale_recursion.hpp"

namespace scalefree::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(long double v) { return num(static_cast<double>(v)); }

std::string format_value(double v) { return num(v); }
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(long v) { return std::to_string(v); }
std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(const std::string& v) { return v; }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

class Csv {
 public:
  void meta(const std::string& key, const std::string& value) {
    body_ << "# " << key << '=' << value << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ << ',';
      body_ << csv_cell(cells[i]);
    }
    body_ << '\n';
  }
  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

// Options of one command, echoed in declaration order as the artifact's
// config block.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    entries_.push_back({name, [&var] { return format_value(var); }});
    return app_->add_option("--" + name, var, help)->capture_default_str();
  }

  void echo(Csv& csv) const {
    for (const auto& [name, value] : entries_) {
      const std::string v = value();
      if (!v.empty()) csv.meta(name, v);
    }
  }

 private:
  struct Entry {
    std::string name;
    std::function<std::string()> value;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

struct Command {
  std::vector<std::string> path;  // e.g. {"noise", "gen"}
  CLI::App* app = nullptr;
  std::unique_ptr<Params> params;
  std::function<void(Csv&)> body;
};

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError(std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ParameterError(std::string(what) + ": empty list");
  return out;
}

FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t a = 0, b = 0;
    const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
    FitWindow w{std::stoi(lo, &a), std::stoi(hi, &b)};
    if (a != lo.size() || b != hi.size()) throw std::invalid_argument(text);
    if (w.lo < 0 || w.hi < w.lo) throw std::invalid_argument(text);
    return w;
  } catch (const std::invalid_argument&) {
    throw ParameterError("--fit-window expects lo:hi with 0 <= lo <= hi, got '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ParameterError("--fit-window out of range: '" + text + "'");
  }
}

SigmaScheme parse_scheme(const std::string& name) {
  if (name == "octave") return SigmaScheme::per_octave_constant;
  if (name == "fixed") return SigmaScheme::fixed_constant;
  throw ParameterError("--scheme must be octave or fixed");
}

Window parse_window_kind(const std::string& name) {
  if (name == "hann") return Window::hann;
  if (name == "rectangular") return Window::rectangular;
  throw ParameterError("--window must be hann or rectangular");
}

// ---- recursion ----

struct RecursionOptions {
  std::string probe = "tau";
  std::string mode = "geometric";
  double epsilon1 = 0.1;
  int levels = kDefaultLevels;
  int first_level = 1;
  double eta0 = 0.1;
  std::string form;
  double t = 2.0;
  double epsilon = 0.01;
  std::string branch = "minus";
  double h = kDefaultFirstDerivativeStep;
  std::string steps = "0.01,0.001,0.0001";
};

void recursion_body(const RecursionOptions& o, Csv& csv) {
  const auto schedule = make_schedule(o.epsilon1, parse_schedule_mode(o.mode), o.levels,
                                      o.first_level);
  if (o.probe == "tau") {
    const auto minus = tau_minus(o.eta0, schedule);
    csv.row({"eta0", "tau_minus", "tau_plus", "t_minus", "normalization", "parity_violation"});
    csv.row({num(o.eta0), num(minus.value), num(tau_plus(o.eta0)), num(1.0 - o.eta0),
             num(minus.normalization), num(parity_violation(o.eta0, schedule))});
  } else if (o.probe == "levels") {
    csv.row({"level", "epsilon", "eta", "eta_prime", "t_minus", "t_plus_prime"});
    for (const auto& s : level_trajectory(o.eta0, schedule)) {
      csv.row({std::to_string(s.n), num(schedule.epsilon(s.n)), num(s.eta), num(s.eta_prime),
               num(s.t_minus), num(s.t_plus_prime)});
    }
  } else if (o.probe == "general") {
    if (o.form.empty()) throw ParameterError("--probe general requires --form reciprocal|direct");
    const GeneralForm form = parse_general_form(o.form);
    csv.row({"t", "epsilon", "form", "phi", "tau_general", "t_dphi_dt"});
    csv.row({num(o.t), num(o.epsilon), to_string(form),
             num(general_phi(o.t, o.epsilon, schedule, form)),
             num(tau_general(o.t, o.epsilon, schedule, form)),
             num(general_phi_residual(o.t, o.epsilon, schedule, form, o.h))});
  } else if (o.probe == "jump") {
    const auto steps = parse_double_list(o.steps, "--steps");
    csv.row({"h", "second_derivative_jump"});
    for (const auto& [h, jump] : jump_sweep(schedule, steps)) csv.row({num(h), num(jump)});
    const auto lead = leading_deviation(schedule);
    csv.meta("deviation_detected", lead.detected ? "true" : "false");
    if (lead.detected) {
      csv.meta("deviation_order", num(lead.order));
      csv.meta("deviation_coefficient", num(lead.coefficient));
    }
  } else if (o.probe == "residual") {
    const auto branch = o.branch == "standard" ? SolutionBranch<double>::standard()
                        : o.branch == "plus"   ? SolutionBranch<double>::plus()
                        : o.branch == "minus"
                            ? SolutionBranch<double>::minus(schedule)
                            : throw ParameterError("--branch must be standard, minus or plus");
    csv.row({"t", "h", "residual"});
    csv.row({num(o.t), num(o.h), num(ode_residual(branch, o.t, o.h))});
  } else {
    throw ParameterError("--probe must be tau, levels, general, jump or residual");
  }
}

// ---- cascade ----

struct CascadeCliOptions {
  int depth = 40;
  double x0 = 1.0;
  int growth_steps = 0;
  double jitter = 0.0;
  std::uint64_t seed = 0;
};

void cascade_body(const CascadeCliOptions& o, Csv& csv) {
  const auto trace = cascade_run(o.x0, o.depth, {o.growth_steps, o.jitter, o.seed});
  const long double nu = golden_mean<long double>();
  csv.row({"k", "pre_inversion", "approximant", "abs_error", "error_bound"});
  long double last = 0.0L;
  for (int k = 0; k < trace.depth; ++k) {
    const auto& e = trace.events[k];
    last = std::fabs(static_cast<long double>(e.post_inversion_value) - nu);
    csv.row({std::to_string(e.level), num(e.pre_inversion_value), num(e.post_inversion_value),
             num(last), num(cascade_error_bound(e.level))});
  }
  csv.meta("final_abs_error", num(last));
}

// ---- logistic ----

struct LogisticOptions {
  int nmax = 12;
  std::string fit_window = "5:12";
  double x0 = kDefaultEdgeOffset;
  std::string mu = "auto";
  double mu_tol = 1e-12;
};

void logistic_body(const LogisticOptions& o, Csv& csv) {
  const FitWindow window = parse_window(o.fit_window);
  double mu = 0.0;
  if (o.mu == "auto") {
    mu = find_mu_infinity(o.mu_tol);
  } else {
    mu = parse_double_list(o.mu, "--mu").front();
  }
  const auto series = sensitivity_at_dyadic_times(o.x0, o.nmax, mu, window);
  csv.row({"n", "t", "log_xi", "xi", "ratio"});
  for (int n = 0; n <= series.n_max(); ++n) {
    csv.row({std::to_string(n), num(series.times(n)), num(series.log_xi(n)), num(series.xi(n)),
             n == 0 ? "" : num(series.ratios(n - 1))});
  }
  csv.meta("mu", num(mu));
  if (series.fit) {
    csv.meta("slope", num(series.fit->slope));
    csv.meta("q", num(series.fit->q));
    csv.meta("lambda_q", num(series.fit->lambda_q));
    csv.meta("p", num(series.fit->p));
    csv.meta("lambda_p", num(series.fit->lambda_p));
    csv.meta("fit_window", std::to_string(series.fit->n_lo) + ":" + std::to_string(series.fit->n_hi));
  }
}

// ---- noise ----

struct NoiseOptions {
  double mean_sigma = 0.2;
  double amplitude = 0.02;
  std::uint64_t seed = 0;
  std::string scheme = "octave";
  long n = 1L << 14;
  double dt = 1.0;
  double t0 = 1.0;
  // spectrum
  std::string source = "sigma";
  double a = 1.0;
  int ensemble = 32;
  long segment = 1L << 10;
  double overlap = kDefaultOverlap;
  std::string window = "hann";
  // validate
  std::string lags = "1,3,7,15,31,63,127,255,511,1023";
};

SigmaProcess sigma_of(const NoiseOptions& o) {
  return {o.mean_sigma, o.amplitude, o.seed, parse_scheme(o.scheme)};
}

void noise_gen_body(const NoiseOptions& o, Csv& csv) {
  const auto series = generate_fluctuation_series(sigma_of(o), o.n, o.dt, o.t0);
  csv.row({"k", "t", "value"});
  for (Eigen::Index k = 0; k < series.size(); ++k) {
    csv.row({std::to_string(k), num(series.time(k)), num(series.values(k))});
  }
}

void noise_spectrum_body(const NoiseOptions& o, Csv& csv) {
  if (o.ensemble < 1) throw ParameterError("--ensemble must be >= 1");
  const Window window = parse_window_kind(o.window);
  std::vector<SpectrumEstimate> spectra;
  for (int i = 0; i < o.ensemble; ++i) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
    NoiseSeries series;
    if (o.source == "sigma") {
      SigmaProcess sigma = sigma_of(o);
      sigma.seed = seed;
      series = generate_fluctuation_series(sigma, o.n, o.dt, o.t0);
    } else if (o.source == "synth") {
      series = synthesize_powerlaw_noise(o.a, o.n, seed);
    } else {
      throw ParameterError("--source must be sigma or synth");
    }
    spectra.push_back(periodogram(series, o.segment, o.overlap, window));
  }
  const auto mean = average_spectra(spectra);
  csv.row({"frequency", "power"});
  for (Eigen::Index k = 0; k < mean.frequencies.size(); ++k) {
    csv.row({num(mean.frequencies(k)), num(mean.power(k))});
  }
  csv.meta("n_segments", std::to_string(mean.n_segments));
  csv.meta("fit_band", num(mean.fit_band.f_lo) + ":" + num(mean.fit_band.f_hi));
  csv.meta("fitted_a", num(mean.fitted_slope_a));
  csv.meta("segment_variance", num(mean.segment_variance));
}

void noise_validate_body(const NoiseOptions& o, Csv& csv) {
  std::vector<long> lags;
  for (double v : parse_double_list(o.lags, "--lags")) {
    if (v != std::floor(v)) throw ParameterError("--lags must be integers");
    lags.push_back(static_cast<long>(v));
  }
  const auto points = autocorrelation_check(sigma_of(o), o.ensemble, o.n, o.dt, o.t0, lags);
  csv.row({"lag", "time", "empirical", "model"});
  for (const auto& p : points) {
    csv.row({std::to_string(p.lag), num(p.time), num(p.empirical), num(p.model)});
  }
  csv.meta("fitted_exponent", num(autocorrelation_slope(points)));
  csv.meta("predicted_exponent", num(o.mean_sigma));
}

// ---- tails ----

struct TailsOptions {
  double eps = 0.5;
  double bulk_cut = kDefaultBulkCut;
  double t_min = -5.0;
  double t_max = 5.0;
  int points = 201;
  long n = 10000;
  std::uint64_t seed = 0;
};

void tails_density_body(const TailsOptions& o, Csv& csv) {
  if (o.points < 2 || !(o.t_max > o.t_min)) {
    throw ParameterError("need --points >= 2 and --t-max > --t-min");
  }
  const auto model = make_fat_normal(o.eps, o.bulk_cut);
  csv.row({"t", "fat_density", "normal_density", "ratio", "fat_cdf", "normal_cdf"});
  for (int i = 0; i < o.points; ++i) {
    const double t = o.t_min + (o.t_max - o.t_min) * i / (o.points - 1);
    const double fat = fat_density(t, model);
    const double normal = normal_density(t);
    csv.row({num(t), num(fat), num(normal), num(fat / normal), num(fat_cdf(t, model)),
             num(normal_cdf(t))});
  }
  csv.meta("normalization", num(model.normalization));
}

void tails_sample_body(const TailsOptions& o, Csv& csv) {
  const auto model = make_fat_normal(o.eps, o.bulk_cut);
  const Eigen::VectorXd samples = sample_fat_normal(model, o.n, o.seed);
  csv.row({"i", "sample"});
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    csv.row({std::to_string(i), num(samples(i))});
  }
  csv.meta("acceptance_rate", num(sampler_acceptance_rate(model)));
  if (samples.size() > 0) csv.meta("ks_distance", num(ks_distance(samples, model)));
}

// ---- validate ----

struct ValidateOptions {
  std::string only = "all";
};

void validate_body(const ValidateOptions& o, Csv& csv) {
  std::vector<int> ids;
  if (o.only == "all") {
    for (const auto& info : check_catalog()) ids.push_back(info.id);
  } else {
    for (double v : parse_double_list(o.only, "--only")) ids.push_back(static_cast<int>(v));
  }
  csv.row({"id", "name", "measured", "comparison", "threshold", "passed", "detail"});
  int failed = 0;
  for (int id : ids) {
    const CheckResult r = run_check(id);
    failed += r.passed ? 0 : 1;
    csv.row({std::to_string(r.id), r.name, num(r.measured), r.comparison, num(r.threshold),
             r.passed ? "true" : "false", r.detail});
  }
  csv.meta("failed", std::to_string(failed));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::filesystem::path resolve_output(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("SCALEFREE_OUT_DIR"); dir && *dir) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

// Number of leading tokens naming the command: 1, or 2 for noise/tails.
std::size_t command_depth(const std::vector<std::string>& args) {
  if (args.empty() || args[0].starts_with("-")) return 0;
  if ((args[0] == "noise" || args[0] == "tails") && args.size() > 1 &&
      !args[1].starts_with("-")) {
    return 2;
  }
  return 1;
}

// Splices the config file named by --config (if any) in right after the
// command tokens, so later command-line flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  const std::size_t depth = command_depth(args);
  std::vector<std::string> head(args.begin(), args.begin() + depth);
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = depth; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return args;

  const std::string subcommand = depth > 0 ? head[0] : "";
  const std::string action = depth > 1 ? head[1] : "";
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(config_path)) {
    if (key == "subcommand") {
      if (value != subcommand) {
        throw ParameterError("config is for subcommand '" + value + "', not '" + subcommand + "'");
      }
      continue;
    }
    if (key == "action") {
      if (value != action) {
        throw ParameterError("config is for action '" + value + "', not '" + action + "'");
      }
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  std::vector<std::string> out = head;
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string body = trim(line);
    if (body.empty()) continue;
    const bool comment = body.front() == '#';
    if (comment) body = trim(body.substr(1));
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      if (comment) continue;
      break;  // header row
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty() || key.find(',') != std::string::npos) break;
    out.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical experiments on scale-free solutions and their statistics", "scalefree"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string out_path;
  std::vector<Command> commands;
  const auto add_command = [&](CLI::App* parent, std::vector<std::string> path,
                               const std::string& help) -> Command& {
    Command c;
    c.path = std::move(path);
    c.app = parent->add_subcommand(c.path.back(), help);
    c.app->add_option("--out", out_path, "output file (relative paths honour SCALEFREE_OUT_DIR)");
    c.app->add_option("--config", "config file of key=value lines (an earlier artifact works)");
    c.params = std::make_unique<Params>(c.app);
    commands.push_back(std::move(c));
    return commands.back();
  };

  RecursionOptions rec;
  {
    auto& c = add_command(&app, {"recursion"}, "recursive solution of t dtau/dt = tau");
    auto& p = *c.params;
    p.add("probe", rec.probe, "tau | levels | general | jump | residual");
    p.add("mode", rec.mode, "schedule: geometric | dyadic | zero | delayed");
    p.add("epsilon1", rec.epsilon1, "first scaling parameter, in (0, 1)");
    p.add("levels", rec.levels, "truncation depth N");
    p.add("first-level", rec.first_level, "first nonzero level for delayed mode");
    p.add("eta0", rec.eta0, "leading scale variable, t = 1 - eta0 on the left branch");
    p.add("form", rec.form, "general solution form: reciprocal | direct (required for general)");
    p.add("t", rec.t, "evaluation point for general / residual");
    p.add("epsilon", rec.epsilon, "epsilon of the general solution");
    p.add("branch", rec.branch, "residual branch: standard | minus | plus");
    p.add("step", rec.h, "finite-difference step");
    p.add("steps", rec.steps, "comma-separated step sweep for jump");
    c.body = [&rec](Csv& csv) { recursion_body(rec, csv); };
  }

  CascadeCliOptions cas;
  {
    auto& c = add_command(&app, {"cascade"}, "golden-mean inversion cascade");
    auto& p = *c.params;
    p.add("depth", cas.depth, "number of inversions");
    p.add("x0", cas.x0, "starting value in (0, 1]");
    p.add("growth-steps", cas.growth_steps, "linear growth steps recorded per level");
    p.add("jitter", cas.jitter, "saturation jitter in [0, 1)");
    p.add("seed", cas.seed, "seed for the jitter");
    c.body = [&cas](Csv& csv) { cascade_body(cas, csv); };
  }

  LogisticOptions log;
  {
    auto& c = add_command(&app, {"logistic"}, "sensitivity at the chaos threshold");
    auto& p = *c.params;
    p.add("nmax", log.nmax, "largest dyadic exponent, t = 2^nmax");
    p.add("fit-window", log.fit_window, "lo:hi range of n used by the q-exponential fit");
    p.add("x0", log.x0, "initial point");
    p.add("mu", log.mu, "map parameter, or auto for the located threshold");
    p.add("mu-tol", log.mu_tol, "tolerance of the threshold search");
    c.body = [&log](Csv& csv) { logistic_body(log, csv); };
  }

  NoiseOptions noise;
  CLI::App* noise_app = app.add_subcommand("noise", "fluctuating-exponent series and spectra");
  noise_app->require_subcommand(1);
  const auto add_sigma = [&noise](Params& p) {
    p.add("mean-sigma", noise.mean_sigma, "mean exponent, in [0, 0.5)");
    p.add("amplitude", noise.amplitude, "standard deviation of the per-octave exponent");
    p.add("seed", noise.seed, "base seed");
    p.add("scheme", noise.scheme, "octave | fixed");
    p.add("n", noise.n, "samples per series");
    p.add("dt", noise.dt, "sampling step");
    p.add("t0", noise.t0, "first sample time");
  };
  {
    auto& c = add_command(noise_app, {"noise", "gen"}, "one fluctuation series");
    add_sigma(*c.params);
    c.body = [&noise](Csv& csv) { noise_gen_body(noise, csv); };
  }
  {
    auto& c = add_command(noise_app, {"noise", "spectrum"}, "ensemble-averaged periodogram");
    auto& p = *c.params;
    add_sigma(p);
    p.add("source", noise.source, "sigma | synth (1/f^a oracle)");
    p.add("a", noise.a, "slope of the synthesized noise");
    p.add("ensemble", noise.ensemble, "number of seeds averaged");
    p.add("segment", noise.segment, "segment length, power of two");
    p.add("overlap", noise.overlap, "segment overlap fraction");
    p.add("window", noise.window, "hann | rectangular");
    c.body = [&noise](Csv& csv) { noise_spectrum_body(noise, csv); };
  }
  {
    auto& c = add_command(noise_app, {"noise", "validate"}, "ensemble autocorrelation check");
    auto& p = *c.params;
    add_sigma(p);
    p.add("ensemble", noise.ensemble, "number of seeds");
    p.add("lags", noise.lags, "comma-separated lags in samples");
    c.body = [&noise](Csv& csv) { noise_validate_body(noise, csv); };
  }

  TailsOptions tails;
  CLI::App* tails_app = app.add_subcommand("tails", "normal law with power-law modulated tail");
  tails_app->require_subcommand(1);
  {
    auto& c = add_command(tails_app, {"tails", "density"}, "density and CDF on a grid");
    auto& p = *c.params;
    p.add("eps", tails.eps, "tail exponent, in [0, 1)");
    p.add("bulk-cut", tails.bulk_cut, "kernel is held constant for |t| below this");
    p.add("t-min", tails.t_min, "grid start");
    p.add("t-max", tails.t_max, "grid end");
    p.add("points", tails.points, "grid points");
    c.body = [&tails](Csv& csv) { tails_density_body(tails, csv); };
  }
  {
    auto& c = add_command(tails_app, {"tails", "sample"}, "rejection samples");
    auto& p = *c.params;
    p.add("eps", tails.eps, "tail exponent, in [0, 1)");
    p.add("bulk-cut", tails.bulk_cut, "kernel is held constant for |t| below this");
    p.add("n", tails.n, "number of samples");
    p.add("seed", tails.seed, "seed");
    c.body = [&tails](Csv& csv) { tails_sample_body(tails, csv); };
  }

  ValidateOptions val;
  {
    auto& c = add_command(&app, {"validate"}, "reproduction checks");
    c.params->add("only", val.only, "comma-separated check ids, or all");
    c.body = [&val](Csv& csv) { validate_body(val, csv); };
  }

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitParameter;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    if (c.app->parsed()) chosen = &c;
  }
  if (!chosen) {
    err << app.help();
    return kExitParameter;
  }

  try {
    Csv csv;
    csv.meta("subcommand", chosen->path.front());
    if (chosen->path.size() > 1) csv.meta("action", chosen->path.back());
    chosen->params->echo(csv);
    chosen->body(csv);
    const std::string text = csv.str();
    if (out_path.empty()) {
      out << text;
    } else {
      const auto path = resolve_output(out_path);
      std::ofstream file(path, std::ios::binary);
      if (!file) throw ParameterError("cannot write '" + path.string() + "'");
      file << text;
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace scalefree::cli
