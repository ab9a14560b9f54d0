#include "qet/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "qet/analytics.hpp"
#include "qet/chain_model.hpp"
#include "qet/cooling.hpp"
#include "qet/eigensolver.hpp"
#include "qet/protocol.hpp"

namespace qet::cli {

namespace {

using nlohmann::ordered_json;

ChainSpec chain_spec(const RunConfig& c, std::size_t sites) {
  ChainSpec spec;
  spec.n_sites = sites;
  spec.coupling = c.coupling;
  spec.boundary = parse_boundary(c.boundary);
  spec.site_a = c.site_a;
  spec.site_b = c.site_b;
  return spec;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions opt;
  opt.tol = c.tol;
  opt.seed = c.seed;
  return opt;
}

void check_size(const RunConfig& c, std::size_t sites) {
  if (sites < 3) throw std::invalid_argument("--sites must be at least 3");
  if (sites > kLargeMaxSites) {
    throw std::invalid_argument("--sites above " + std::to_string(kLargeMaxSites) + " is not supported");
  }
  if (sites > kDefaultMaxSites && !c.large) {
    throw std::invalid_argument("--sites above " + std::to_string(kDefaultMaxSites) + " requires --large");
  }
}

ordered_json echo_config(const RunConfig& c, std::string_view command) {
  ordered_json j;
  j["command"] = command;
  j["sites"] = c.sites;
  j["j"] = c.coupling;
  j["bc"] = c.boundary;
  j["site_a"] = c.site_a;
  j["site_b"] = c.site_b;
  j["axis_a"] = c.axis_a;
  j["axis_b"] = c.axis_b;
  j["best_axes"] = c.best_axes;
  j["axis_resolution"] = c.axis_resolution;
  j["theta"] = c.theta ? ordered_json(*c.theta) : ordered_json(nullptr);
  j["sizes"] = c.sizes;
  j["distances"] = c.distances;
  j["fit_range"] = c.fit_range;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["c_fit_range"] = c.c_fit_range;
  j["c"] = c.c_constant;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["format"] = c.format == Format::Json ? "json" : "csv";
  j["large"] = c.large;
  return j;
}

ordered_json axis_json(const Axis& a) {
  const auto& v = a.components();
  return ordered_json::array({v[0], v[1], v[2]});
}

MeasurementSetup choose_setup(const RunConfig& c, const CalibratedChain& chain, bool best) {
  if (best) return axis_sweep(chain, c.axis_resolution).best;
  return {parse_axis(c.axis_a), parse_axis(c.axis_b)};
}

std::string axes_note(const MeasurementSetup& s) { return "axes=" + s.axis_a.label() + "/" + s.axis_b.label(); }

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("range must look like lo:hi, got '" + std::string(text) + "'");
  std::int64_t lo = 0, hi = 0;
  const auto a = text.substr(0, colon);
  const auto b = text.substr(colon + 1);
  if (std::from_chars(a.data(), a.data() + a.size(), lo).ptr != a.data() + a.size() ||
      std::from_chars(b.data(), b.data() + b.size(), hi).ptr != b.data() + b.size() || a.empty() || b.empty()) {
    throw std::invalid_argument("range must look like lo:hi, got '" + std::string(text) + "'");
  }
  if (hi < lo) throw std::invalid_argument("range '" + std::string(text) + "' is empty");
  return {lo, hi};
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = std::min(text.find(',', pos), text.size());
    const auto item = text.substr(pos, next - pos);
    std::size_t v = 0;
    if (item.empty() || std::from_chars(item.data(), item.data() + item.size(), v).ptr != item.data() + item.size()) {
      throw std::invalid_argument("size list must be comma-separated integers, got '" + std::string(text) + "'");
    }
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

void validate(const RunConfig& c, std::string_view command) {
  if (!(c.tol > 0.0) || !std::isfinite(c.tol)) throw std::invalid_argument("--tol must be positive");
  if (!std::isfinite(c.coupling) || c.coupling <= 0.0) throw std::invalid_argument("--j must be positive");
  parse_boundary(c.boundary);
  parse_axis(c.axis_a);
  parse_axis(c.axis_b);
  if (c.theta && !std::isfinite(*c.theta)) throw std::invalid_argument("--theta must be finite");
  if (command == "analytic") {
    if (c.n_min < 1 || c.n_max < c.n_min) throw std::invalid_argument("--n-min/--n-max must satisfy 1 <= n-min <= n-max");
    if (!(c.c_constant > 0.0)) throw std::invalid_argument("--c must be positive");
    const auto [lo, hi] = parse_range(c.c_fit_range);
    if (lo < 1) throw std::invalid_argument("--c-fit-range must start at 1 or above");
    (void)hi;
    return;
  }
  if (command == "sweep") {
    const auto [lo, hi] = parse_range(c.fit_range);
    if (lo < 1) throw std::invalid_argument("--fit-range must start at 1 or above");
    (void)hi;
    const auto sizes = c.sizes.empty() ? std::vector<std::size_t>{c.sites} : parse_size_list(c.sizes);
    for (auto n : sizes) check_size(c, n);
    if (!c.distances.empty()) {
      const auto [dlo, dhi] = parse_range(c.distances);
      if (dlo < 1) throw std::invalid_argument("--distances must start at 1 or above");
      for (auto n : sizes) {
        if (static_cast<std::size_t>(dhi) >= n) throw std::invalid_argument("--distances exceeds chain size");
      }
    }
    return;
  }
  check_size(c, c.sites);
  chain_spec(c, c.sites).validate();
  if (command == "cool" && c.restarts == 0) throw std::invalid_argument("--restarts must be at least 1");
}

Report cmd_ground(const RunConfig& c) {
  validate(c, "ground");
  const CalibratedChain chain = calibrate_chain(chain_spec(c, c.sites), solver_options(c));
  const double scale = chain.spec.energy_scale();
  const auto profile = energy_profile(chain.ground.state, chain.densities);

  Report r;
  r.json["config"] = echo_config(c, "ground");
  r.json["energy"] = chain.ground.energy;
  r.json["raw_energy"] = chain.raw_energy;
  r.json["residual"] = chain.ground.residual;
  r.json["iterations"] = chain.ground.iterations;
  r.json["converged"] = chain.ground.converged;
  r.json["gap"] = chain.ground.gap ? ordered_json(*chain.ground.gap) : ordered_json(nullptr);
  r.json["near_degenerate"] = chain.ground.near_degenerate;

  r.csv_header = {"n", "epsilon_n", "T_n_expect", "eps_min"};
  ordered_json sites = ordered_json::array();
  double max_density = 0.0;
  bool witness = true;
  for (std::size_t n = 0; n < chain.spec.n_sites; ++n) {
    const LocalSpectrum spec = local_density_spectrum(chain.spec, n);
    max_density = std::max(max_density, std::abs(profile[n]));
    if (spec.support.size() == 3) witness = witness && spec.minimum() < 0.0;
    sites.push_back({{"n", n}, {"epsilon", chain.spec.epsilon[n]}, {"t_expect", profile[n]}, {"eps_min", spec.minimum()}});
    r.csv_rows.push_back({std::to_string(n), format_number(chain.spec.epsilon[n]), format_number(profile[n]),
                          format_number(spec.minimum())});
  }
  r.json["sites"] = sites;
  const bool calibrated = max_density < kCalibrationTolerance * scale;
  const bool zero_energy = std::abs(chain.ground.energy) < 1e-9 * scale;
  r.json["checks"] = {{"calibration", calibrated}, {"zero_ground_energy", zero_energy}, {"negative_density", witness}};
  r.ok = chain.ground.converged && calibrated && zero_energy && witness;
  return r;
}

Report cmd_teleport(const RunConfig& c) {
  validate(c, "teleport");
  const CalibratedChain chain = calibrate_chain(chain_spec(c, c.sites), solver_options(c));
  const double scale = chain.spec.energy_scale();
  const MeasurementSetup setup = choose_setup(c, chain, c.best_axes);
  const ProtocolResult p = run_protocol(chain, setup, c.theta);

  Report r;
  r.json["config"] = echo_config(c, "teleport");
  r.json["axis_a"] = axis_json(setup.axis_a);
  r.json["axis_b"] = axis_json(setup.axis_b);
  r.json["distance"] = chain.spec.distance(chain.spec.site_a, chain.spec.site_b);
  r.json["e_a"] = p.e_a;
  r.json["xi"] = p.xi;
  r.json["eta"] = p.eta;
  r.json["theta_star"] = p.theta_star;
  r.json["theta_used"] = p.theta_used;
  r.json["e_b"] = p.e_b;
  r.json["tr_rho_h"] = p.final_energy;
  r.json["e_b_simulated"] = p.e_b_simulated;
  r.json["identity_residual"] = p.identity_residual;
  r.json["profiles"] = {{"ground", p.profiles.ground}, {"measured", p.profiles.measured}, {"feedback", p.profiles.feedback}};
  const double sum_measured = sum_of(p.profiles.measured);
  const double sum_feedback = sum_of(p.profiles.feedback);
  r.json["profile_sums"] = {{"ground", sum_of(p.profiles.ground)}, {"measured", sum_measured}, {"feedback", sum_feedback}};

  const bool sums = std::abs(sum_measured - p.e_a) < 1e-10 * scale && std::abs(sum_feedback - p.final_energy) < 1e-10 * scale;
  const bool identity = p.identity_residual < kIdentityTolerance * scale;
  const bool positive = std::abs(p.eta) <= 1e-8 * scale || p.e_b > 0.0;
  const bool bounded = p.e_a >= p.e_b;
  r.json["checks"] = {{"profile_sums", sums}, {"energy_identity", identity}, {"e_b_positive", positive}, {"e_a_ge_e_b", bounded}};
  r.ok = chain.ground.converged && sums && identity && positive && bounded;

  r.csv_header = {"n", "ground", "measured", "feedback"};
  for (std::size_t n = 0; n < chain.spec.n_sites; ++n) {
    r.csv_rows.push_back({std::to_string(n), format_number(p.profiles.ground[n]), format_number(p.profiles.measured[n]),
                          format_number(p.profiles.feedback[n])});
  }
  return r;
}

Report cmd_sweep(const RunConfig& c) {
  validate(c, "sweep");
  const auto sizes = c.sizes.empty() ? std::vector<std::size_t>{c.sites} : parse_size_list(c.sizes);
  const AnalyticConfig acfg{c.coupling, c.c_constant};

  Report r;
  r.json["config"] = echo_config(c, "sweep");
  r.csv_header = {"n", "distance", "eb_numeric", "eb_closed", "delta", "note"};
  ordered_json rows = ordered_json::array();
  ordered_json per_size = ordered_json::array();
  bool all_decreasing = true;

  for (auto n : sizes) {
    RunConfig local = c;
    local.site_a = 0;
    local.site_b = 1;
    const CalibratedChain base = calibrate_chain(chain_spec(local, n), solver_options(c));
    const auto boundary = base.spec.boundary;
    std::int64_t d_lo = 1;
    std::int64_t d_hi = boundary == Boundary::Periodic ? static_cast<std::int64_t>(n / 2) : static_cast<std::int64_t>(n - 1);
    if (!c.distances.empty()) std::tie(d_lo, d_hi) = parse_range(c.distances);

    std::vector<double> xs, ys;
    double previous = 0.0;
    bool decreasing = true;
    for (std::int64_t d = d_lo; d <= d_hi; ++d) {
      CalibratedChain chain = base;
      chain.spec.site_b = static_cast<std::size_t>(d);
      const MeasurementSetup setup = choose_setup(c, chain, c.best_axes || !c.axes_explicit);
      const ProtocolResult p = run_protocol(chain, setup);
      const double closed = eb_closed_form(acfg, d);
      const double del = delta(d);
      std::string note = axes_note(setup);
      if (p.identity_residual >= kIdentityTolerance * base.spec.energy_scale()) note += ";identity-invalid";
      if (d > d_lo && !(p.e_b < previous)) decreasing = false;
      previous = p.e_b;
      if (p.e_b > 0.0) {
        xs.push_back(std::log(static_cast<double>(d)));
        ys.push_back(std::log(p.e_b));
      }
      rows.push_back({{"n", n}, {"distance", d}, {"eb_numeric", p.e_b}, {"eb_closed", closed}, {"delta", del}, {"note", note}});
      r.csv_rows.push_back({std::to_string(n), std::to_string(d), format_number(p.e_b), format_number(closed),
                            format_number(del), note});
    }
    ordered_json entry{{"n", n}, {"numeric_decreasing", decreasing}};
    entry["numeric_loglog_slope"] = xs.size() >= 2 ? ordered_json(fit_line(xs, ys).slope) : ordered_json(nullptr);
    per_size.push_back(entry);
    all_decreasing = all_decreasing && decreasing;
  }
  const auto [lo, hi] = parse_range(c.fit_range);
  const double slope = closed_form_loglog_slope(acfg, lo, hi);
  r.json["rows"] = rows;
  r.json["per_size"] = per_size;
  r.json["closed_loglog_slope"] = slope;
  r.json["checks"] = {{"numeric_decreasing", all_decreasing}};
  r.ok = all_decreasing;
  return r;
}

Report cmd_analytic(const RunConfig& c) {
  validate(c, "analytic");
  const AnalyticConfig acfg{c.coupling, c.c_constant};
  const auto [flo, fhi] = parse_range(c.c_fit_range);
  const double fitted_c = fit_asymptotic_constant(flo, fhi);
  const AnalyticConfig fitted{c.coupling, fitted_c};

  Report r;
  r.json["config"] = echo_config(c, "analytic");
  r.json["prefactor"] = asymptotic_prefactor(c.c_constant);
  r.json["fitted_c"] = fitted_c;
  r.json["residual_energy"] = residual_energy_analytic(acfg);
  r.csv_header = {"n", "log_delta", "delta", "eb_closed", "delta_asym", "ratio", "ratio_fitted", "local_exponent"};
  ordered_json rows = ordered_json::array();
  bool bound = true;
  for (std::int64_t n = c.n_min; n <= c.n_max; ++n) {
    const double ld = log_delta(n);
    const double d = std::exp(ld);
    const double eb = eb_closed_form(acfg, n);
    const double asym = delta_asymptotic(acfg, static_cast<double>(n));
    const double ratio = d / asym;
    const double ratio_fit = d / delta_asymptotic(fitted, static_cast<double>(n));
    const double expo = local_delta_exponent(n);
    bound = bound && residual_energy_analytic(acfg) > eb;
    rows.push_back({{"n", n}, {"log_delta", ld}, {"delta", d}, {"eb_closed", eb}, {"delta_asym", asym},
                    {"ratio", ratio}, {"ratio_fitted", ratio_fit}, {"local_exponent", expo}});
    r.csv_rows.push_back({std::to_string(n), format_number(ld), format_number(d), format_number(eb), format_number(asym),
                          format_number(ratio), format_number(ratio_fit), format_number(expo)});
  }
  r.json["rows"] = rows;
  if (c.n_max - c.n_min >= 1) {
    r.json["loglog_slope"] = closed_form_loglog_slope(acfg, c.n_min, c.n_max);
  }
  r.json["checks"] = {{"residual_exceeds_teleported", bound}};
  r.ok = bound;
  return r;
}

Report cmd_cool(const RunConfig& c) {
  validate(c, "cool");
  const CalibratedChain chain = calibrate_chain(chain_spec(c, c.sites), solver_options(c));
  const double scale = chain.spec.energy_scale();
  const MeasurementSetup setup = choose_setup(c, chain, c.best_axes);
  const ProtocolResult p = run_protocol(chain, setup);
  CoolingOptions opt;
  opt.restarts = c.restarts;
  opt.seed = c.seed;
  const CoolingResult cool = minimize_residual(chain, setup, opt);

  Report r;
  r.json["config"] = echo_config(c, "cool");
  r.json["axis_a"] = axis_json(setup.axis_a);
  r.json["axis_b"] = axis_json(setup.axis_b);
  r.json["e_r_numeric"] = cool.e_r_numeric;
  r.json["e_b"] = p.e_b;
  r.json["e_a"] = cool.e_a;
  r.json["e_r_analytic"] = residual_energy_analytic({c.coupling, c.c_constant});
  r.json["best_restart"] = cool.best_restart;
  r.json["converged_restarts"] = cool.converged_restarts;
  r.json["per_outcome_minima"] = cool.per_outcome_minima;
  r.json["per_restart_minima"] = cool.per_restart_minima;
  r.json["completeness_error"] = cool.best_channel.completeness_error();
  const bool bound = cool.e_r_numeric >= p.e_b - 1e-8 * scale;
  const bool feasible = cool.e_r_numeric <= cool.e_a + 1e-12 * scale;
  const bool nonneg = cool.e_r_numeric >= -1e-9 * scale;
  r.json["checks"] = {{"bound_e_r_ge_e_b", bound}, {"e_r_le_e_a", feasible}, {"nonnegative", nonneg}};
  r.ok = bound && feasible && nonneg;
  r.csv_header = {"restart", "minimum"};
  for (std::size_t i = 0; i < cool.per_restart_minima.size(); ++i) {
    r.csv_rows.push_back({std::to_string(i), format_number(cool.per_restart_minima[i])});
  }
  return r;
}

std::string render(const Report& report, Format format) {
  if (format == Format::Json) return report.json.dump(2) + "\n";
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(fields[i]);
    }
    out += "\r\n";
  };
  line(report.csv_header);
  for (const auto& row : report.csv_rows) line(row);
  return out;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Quantum energy teleportation on critical Ising chains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  RunConfig c;
  std::string format = "json";
  double theta = 0.0;
  app.add_option("--sites", c.sites, "number of spins N");
  app.add_option("--j", c.coupling, "coupling J > 0");
  app.add_option("--bc", c.boundary, "boundary condition")->check(CLI::IsMember({"periodic", "open"}));
  app.add_option("--site-a", c.site_a, "measurement site (0-based)");
  app.add_option("--site-b", c.site_b, "feedback site (0-based)");
  auto* axis_a_opt = app.add_option("--axis-a", c.axis_a, "sigma_A axis: x, y, z or ax,ay,az");
  auto* axis_b_opt = app.add_option("--axis-b", c.axis_b, "sigma_B axis: x, y, z or ax,ay,az");
  app.add_flag("--best-axes", c.best_axes, "pick the axis pair maximizing E_B");
  app.add_option("--axis-resolution", c.axis_resolution, "refined spherical grid for --best-axes");
  auto* theta_opt = app.add_option("--theta", theta, "override the feedback angle (radians)");
  app.add_option("--sizes", c.sizes, "sweep: comma-separated chain sizes");
  app.add_option("--distances", c.distances, "sweep: lo:hi circular distances");
  app.add_option("--fit-range", c.fit_range, "sweep: lo:hi for the closed-form log-log slope");
  app.add_option("--n-min", c.n_min, "analytic: first n");
  app.add_option("--n-max", c.n_max, "analytic: last n");
  app.add_option("--c-fit-range", c.c_fit_range, "analytic: lo:hi used to fit c");
  app.add_option("--c", c.c_constant, "asymptotic constant c");
  app.add_option("--restarts", c.restarts, "cool: optimizer restarts");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--tol", c.tol, "eigensolver residual tolerance");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", c.out, "write output here instead of stdout");
  app.add_flag("--large", c.large, "allow up to 20 sites");

  auto* ground = app.add_subcommand("ground", "calibrated ground state and local spectra");
  auto* teleport = app.add_subcommand("teleport", "run the measure / communicate / feedback protocol");
  auto* sweep = app.add_subcommand("sweep", "E_B against distance and chain size");
  auto* analytic = app.add_subcommand("analytic", "closed-form Delta(n), E_B(n) and asymptotics");
  auto* cool = app.add_subcommand("cool", "minimize residual energy over local channels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (theta_opt->count() > 0) c.theta = theta;
  c.axes_explicit = axis_a_opt->count() > 0 || axis_b_opt->count() > 0;
  c.format = format == "csv" ? Format::Csv : Format::Json;

  try {
    Report report;
    if (ground->parsed()) report = cmd_ground(c);
    else if (teleport->parsed()) report = cmd_teleport(c);
    else if (sweep->parsed()) report = cmd_sweep(c);
    else if (analytic->parsed()) report = cmd_analytic(c);
    else if (cool->parsed()) report = cmd_cool(c);
    const std::string text = render(report, c.format);
    if (c.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream file(c.out, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open output file " + c.out);
      file << text;
    }
    if (!report.ok) {
      std::cerr << "error: one or more built-in checks failed (see \"checks\")\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qet::cli
