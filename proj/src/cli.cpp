#include "fracdisk/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/csv.hpp"
#include "fracdisk/ctrw.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/mc.hpp"
#include "fracdisk/moments.hpp"
#include "fracdisk/solver.hpp"
#include "fracdisk/subsim.hpp"
#include "fracdisk/wrapped.hpp"

namespace fracdisk::cli {
namespace {

using Json = nlohmann::ordered_json;
using cplx = std::complex<double>;

// Flag values collected by CLI11; a value is applied only if its flag was given.
struct Flags {
  std::string config_path;
  std::string output;
  std::uint64_t seed = 0;
  std::string family;
  double alpha = 0.0;
  double mu = 0.0;
  double drift_b = 0.0;
  int k_max = 0;
  std::vector<double> times;
  std::string method;
  std::vector<double> coeffs;
  std::vector<double> radii;
  std::vector<double> angles;
  double t = 0.0;
  double s = 0.0;
  int grid_points = 0;
  std::vector<int> r_list;
  std::size_t n_paths = 0;
  double step_dt = 0.0;
  std::vector<double> scales;
  std::string jump_mode;
  std::string y_mode;
};

// Config keys accepted by each command, with their defaults.
const std::map<std::string, Json>& command_defaults(const std::string& command) {
  static const std::map<std::string, std::map<std::string, Json>> table = {
      {"dk", {{"k_max", 5}, {"times", Json::array({0.5, 1.0, 2.0})}, {"method", "auto"}}},
      {"solve",
       {{"coeffs", Json::array({0.0, 1.0})},
        {"nd_terms", nullptr},
        {"points", nullptr},
        {"r", Json::array({0.5, 1.0})},
        {"phi", Json::array({0.0, 1.5707963267948966})},
        {"times", Json::array({0.0, 1.0})}}},
      {"density", {{"t", 1.0}, {"grid_points", 256}}},
      {"moments",
       {{"r_list", Json::array({1, 2, 3})},
        {"t_list", Json::array({1.0})},
        {"n_paths", 100000},
        {"step_dt", subsim::kDefaultStepDt}}},
      {"mixed", {{"s", 0.5}, {"t", 1.0}, {"n_paths", 100000}, {"step_dt", subsim::kDefaultStepDt}}},
      {"ctrw",
       {{"scales", Json::array({100.0, 1000.0, 10000.0})},
        {"t", 1.0},
        {"k_max", 3},
        {"n_paths", 100000},
        {"jump_mode", "exact_stable"},
        {"y_mode", "rademacher"}}},
  };
  return table.at(command);
}

bool given(const CLI::App& sub, const std::string& flag) {
  const CLI::Option* opt = sub.get_option_no_throw(flag);
  return opt != nullptr && opt->count() > 0;
}

bool is_stochastic(const std::string& command) {
  return command == "moments" || command == "mixed" || command == "ctrw";
}

Json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

std::uint64_t resolve_seed(const Json& file, const CLI::App& sub, const Flags& flags, std::ostream& err) {
  if (given(sub, "--seed")) return flags.seed;
  if (file.contains("seed")) {
    if (!file["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    return file["seed"].get<std::uint64_t>();
  }
  if (const char* env = std::getenv("FRACDISK_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError("FRACDISK_SEED must be a non-negative integer");
    return v;
  }
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << seed << '\n';
  return seed;
}

// Merges file, flags and defaults into the resolved configuration.
Json resolve_config(const std::string& command, const CLI::App& sub, const Flags& flags, std::ostream& err) {
  Json file = flags.config_path.empty() ? Json::object() : read_config_file(flags.config_path);
  if (!file.is_object()) throw ConfigError("config must be a JSON object");
  const auto& defaults = command_defaults(command);
  for (const auto& [key, value] : file.items()) {
    if (key == "spec" || key == "seed" || key == "output") continue;
    if (defaults.find(key) == defaults.end()) throw ConfigError("unknown config field '" + key + "' for " + command);
  }
  Json spec = file.contains("spec") ? file["spec"] : Json::object();
  if (!spec.is_object()) throw ConfigError("'spec' must be a JSON object");
  if (given(sub, "--family")) spec["family"] = flags.family;
  if (given(sub, "--alpha")) spec["alpha"] = flags.alpha;
  if (given(sub, "--mu")) spec["mu"] = flags.mu;
  if (given(sub, "--drift-b")) spec["drift_b"] = flags.drift_b;
  if (!spec.contains("family")) spec["family"] = "stable";
  if (!spec.contains("alpha")) throw ConfigError("spec: 'alpha' is required (config 'spec' or --alpha)");

  Json resolved;
  resolved["command"] = command;
  resolved["spec"] = to_json(bernstein_from_json(spec));
  for (const auto& [key, value] : defaults) resolved[key] = file.contains(key) ? file[key] : value;
  auto set = [&](const char* flag, const char* key, const Json& value) {
    if (given(sub, flag)) resolved[key] = value;
  };
  set("--k-max", "k_max", flags.k_max);
  set("--times", "times", flags.times);
  set("--method", "method", flags.method);
  set("--coeffs", "coeffs", flags.coeffs);
  set("--r", "r", flags.radii);
  set("--phi", "phi", flags.angles);
  set("--t", "t", flags.t);
  set("--s", "s", flags.s);
  set("--grid-points", "grid_points", flags.grid_points);
  set("--r-list", "r_list", flags.r_list);
  set("--t-list", "t_list", flags.times);
  set("--n-paths", "n_paths", flags.n_paths);
  set("--step-dt", "step_dt", flags.step_dt);
  set("--scales", "scales", flags.scales);
  set("--jump-mode", "jump_mode", flags.jump_mode);
  set("--y-mode", "y_mode", flags.y_mode);
  if (is_stochastic(command)) resolved["seed"] = resolve_seed(file, sub, flags, err);
  std::string output = file.contains("output") ? file["output"].get<std::string>() : "-";
  if (given(sub, "--out")) output = flags.output;
  resolved["output"] = output;
  return resolved;
}

template <class T>
T get(const Json& config, const char* key) {
  try {
    return config.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

cplx parse_complex(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError("complex numbers are written as a number or [re, im]");
}

BernsteinSpec spec_of(const Json& config) { return bernstein_from_json(config.at("spec")); }

RngStream stream_of(const Json& config) { return RngStream{config.at("seed").get<std::uint64_t>(), 0}; }

// Where results go: a file named by the config, or `out`.
class Sink {
 public:
  Sink(const Json& config, std::ostream& out) : path_(config.at("output").get<std::string>()), out_(out) {}
  std::ostream& stream() { return path_ == "-" ? out_ : buffer_; }
  bool to_file() const { return path_ != "-"; }
  const std::string& path() const { return path_; }
  void flush() {
    if (!to_file()) return;
    std::ofstream f(path_);
    if (!f) throw ConfigError("cannot write output file '" + path_ + "'");
    f << buffer_.str();
  }

 private:
  std::string path_;
  std::ostream& out_;
  std::ostringstream buffer_;
};

// CSV outputs carry the resolved config in a sidecar <output>.json, or on the
// error stream when writing to standard output.
void emit_csv_config(const Json& config, const Sink& sink, std::ostream& err) {
  if (sink.to_file()) {
    std::ofstream f(sink.path() + ".json");
    if (!f) throw ConfigError("cannot write '" + sink.path() + ".json'");
    f << config.dump(2) << '\n';
  } else {
    err << "config: " << config.dump() << '\n';
  }
}

void cmd_dk(const Json& config, std::ostream& out, std::ostream& err) {
  const BernsteinSpec spec = spec_of(config);
  const auto times = get<std::vector<double>>(config, "times");
  const int k_max = get<int>(config, "k_max");
  if (k_max < 0) throw ConfigError("k_max must be >= 0");
  const kernels::Method method = kernels::parse_method(get<std::string>(config, "method"));
  const kernels::KernelTable table = kernels::build_table(spec, k_max, times, method);
  kernels::check_invariants(table);
  Sink sink(config, out);
  kernels::write_table_csv(sink.stream(), table);
  sink.flush();
  emit_csv_config(config, sink, err);
}

void cmd_solve(const Json& config, std::ostream& out, std::ostream& err) {
  const BernsteinSpec spec = spec_of(config);
  const auto times = get<std::vector<double>>(config, "times");
  Sink sink(config, out);
  if (!config.at("nd_terms").is_null()) {
    solver::NdTaylorCoeffs f;
    const Json& terms = config.at("nd_terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError("nd_terms must be a non-empty array");
    f.dim = static_cast<int>(terms[0].at("k").size());
    for (const Json& term : terms) {
      if (!term.is_object() || !term.contains("k") || !term.contains("a") || term.size() != 2) {
        throw ConfigError("each nd_terms entry is {\"k\": [...], \"a\": coefficient}");
      }
      f.terms[term["k"].get<std::vector<int>>()] += parse_complex(term["a"]);
    }
    solver::validate(f);
    const Json& points = config.at("points");
    if (!points.is_array() || points.empty()) throw ConfigError("n-D solve needs a non-empty 'points' array");
    const kernels::KernelTable table = kernels::build_table_k2(spec, solver::nd_k2_values(f), times);
    sink.stream() << "point,t,re_u,im_u\n";
    for (std::size_t p = 0; p < points.size(); ++p) {
      std::vector<cplx> z;
      for (const Json& v : points[p]) z.push_back(parse_complex(v));
      for (double t : times) {
        const cplx u = solver::evaluate_solution_nd(f, z, t, table);
        sink.stream() << p << ',' << csv::num(t) << ',' << csv::num(u.real()) << ',' << csv::num(u.imag()) << '\n';
      }
    }
  } else {
    solver::TaylorCoeffs f;
    const Json& coeffs = config.at("coeffs");
    if (!coeffs.is_array() || coeffs.empty()) throw ConfigError("coeffs must be a non-empty array");
    for (const Json& v : coeffs) f.coeffs.push_back(parse_complex(v));
    solver::validate(f);
    const int k_max = static_cast<int>(f.coeffs.size()) - 1;
    const kernels::KernelTable table = kernels::build_table(spec, k_max, times);
    solver::write_field_csv_header(sink.stream());
    for (double r : get<std::vector<double>>(config, "r")) {
      for (double phi : get<std::vector<double>>(config, "phi")) {
        const solver::DiskPoint z = solver::make_disk_point(r, phi);
        for (double t : times) solver::write_field_csv_row(sink.stream(), r, phi, t, solver::evaluate_solution(f, z, t, table));
      }
    }
  }
  sink.flush();
  emit_csv_config(config, sink, err);
}

void cmd_density(const Json& config, std::ostream& out, std::ostream& err) {
  const BernsteinSpec spec = spec_of(config);
  const double t = get<double>(config, "t");
  const int points = get<int>(config, "grid_points");
  if (points < 1) throw ConfigError("grid_points must be >= 1");
  const std::vector<double> times{t};
  const kernels::KernelTable table = wrapped::density_table(spec, times);
  std::vector<double> phi(static_cast<std::size_t>(points));
  std::vector<double> mu(phi.size());
  bool clamped = false;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / points;
    const wrapped::DensityValue d = wrapped::wrapped_density(table, wrapped::Angle(phi[i]), t);
    mu[i] = d.value;
    clamped = clamped || d.clamped;
  }
  if (clamped) err << "warning: negative truncated density values were clamped to 0\n";
  Sink sink(config, out);
  wrapped::write_density_csv(sink.stream(), phi, mu);
  sink.flush();
  emit_csv_config(config, sink, err);
}

void write_json(const Json& config, Json body, std::ostream& out) {
  Json doc;
  doc["config"] = config;
  for (auto& [key, value] : body.items()) doc[key] = value;
  Sink sink(config, out);
  sink.stream() << doc.dump(2) << '\n';
  sink.flush();
}

void cmd_moments(const Json& config, std::ostream& out) {
  const BernsteinSpec spec = spec_of(config);
  const auto r_list = get<std::vector<int>>(config, "r_list");
  const auto t_list = get<std::vector<double>>(config, "t_list");
  const auto n_paths = get<std::size_t>(config, "n_paths");
  const double step_dt = get<double>(config, "step_dt");
  if (r_list.empty() || t_list.empty()) throw ConfigError("r_list and t_list must be non-empty");
  for (int r : r_list) {
    if (r < 1) throw ConfigError("r_list entries must be >= 1");
  }
  if (n_paths < 2) throw ConfigError("n_paths must be >= 2");
  const int r_max = *std::max_element(r_list.begin(), r_list.end());
  const kernels::KernelTable table = kernels::build_table(spec, r_max, t_list);
  const RngStream stream = stream_of(config);
  const auto theta = wrapped::sample_wrapped_paths(spec, t_list, n_paths, step_dt, stream.child(0));
  Json records = Json::array();
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    for (int r : r_list) {
      moments::MomentReport rep;
      rep.quantity = "circular_moment";
      rep.params = {{"r", r}, {"t", t_list[i]}, {"n_paths", n_paths}, {"step_dt", step_dt}};
      rep.analytic = moments::circular_moment(table, r, t_list[i]);
      std::vector<double> c(n_paths);
      for (std::size_t p = 0; p < n_paths; ++p) c[p] = std::cos(r * theta[i][p]);
      const mc::Estimate e = mc::summarize(c);
      rep.mc = e.mean;
      rep.se = e.se;
      rep.adjudicate(3.0, 0.5 * r * r * step_dt);
      records.push_back(moments::to_json(rep));
    }
  }
  Json convention = Json::array();
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (t_list[i] <= 0.0) continue;
    const auto rows = moments::convention_adjudication(spec, r_list, t_list[i], n_paths, step_dt, stream.child(1 + i));
    for (const auto& row : rows) convention.push_back(moments::to_json(row));
  }
  write_json(config, {{"records", records}, {"convention", convention}}, out);
}

void cmd_mixed(const Json& config, std::ostream& out) {
  const BernsteinSpec spec = spec_of(config);
  const double s = get<double>(config, "s");
  const double t = get<double>(config, "t");
  const auto n_paths = get<std::size_t>(config, "n_paths");
  const double step_dt = get<double>(config, "step_dt");
  if (!(s >= 0.0 && t >= s)) throw ConfigError("mixed needs 0 <= s <= t");
  if (n_paths < 2) throw ConfigError("n_paths must be >= 2");
  moments::MomentReport mc_rep = moments::mixed_moment_mc(spec, s, t, n_paths, step_dt, stream_of(config));
  Json body;
  body["mc"] = {{"mean", mc_rep.mc}, {"se", mc_rep.se}};
  Json records = Json::array();
  const bool stable = spec.family() == Family::Stable && spec.drift_b() == 0.0;
  if (stable) {
    const moments::SeriesValue series = moments::mixed_moment_stable_series(spec.alpha(), s, t);
    const double integral = moments::mixed_moment_integral(spec, s, t);
    body["series"] = {{"value", series.value}, {"tail_bound", series.tail_bound}, {"terms", series.terms}};
    body["integral"] = integral;
    body["series_minus_integral"] = series.value - integral;
    for (const auto& [name, value] : {std::pair{"mixed_series_vs_mc", series.value}, {"mixed_integral_vs_mc", integral}}) {
      moments::MomentReport rep = mc_rep;
      rep.quantity = name;
      rep.analytic = value;
      rep.adjudicate(3.0, step_dt);
      records.push_back(moments::to_json(rep));
    }
  } else {
    body["series"] = nullptr;
    body["integral"] = nullptr;
  }
  body["records"] = records;
  write_json(config, body, out);
}

void cmd_ctrw(const Json& config, std::ostream& out) {
  const BernsteinSpec spec = spec_of(config);
  if (spec.drift_b() != 0.0) throw ConfigError("ctrw: the limit clock must have no drift");
  ctrw::CtrwConfig base;
  base.alpha = spec.alpha();
  base.mu = spec.mu();
  base.jump_mode = ctrw::parse_jump_mode(get<std::string>(config, "jump_mode"));
  base.y_mode = ctrw::parse_y_mode(get<std::string>(config, "y_mode"));
  const auto scales = get<std::vector<double>>(config, "scales");
  const auto n_paths = get<std::size_t>(config, "n_paths");
  const ctrw::ConvergenceReport report =
      ctrw::convergence_report(base, get<double>(config, "t"), get<int>(config, "k_max"), scales, n_paths,
                               stream_of(config));
  write_json(config, {{"report", ctrw::to_json(report)}}, out);
}

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_path, "JSON config file");
  sub.add_option("--out", f.output, "output path ('-' for standard output)");
  sub.add_option("--family", f.family, "stable or tempered");
  sub.add_option("--alpha", f.alpha, "stability index");
  sub.add_option("--mu", f.mu, "tempering parameter");
  sub.add_option("--drift-b", f.drift_b, "drift of the clock");
}

void add_seed(CLI::App& sub, Flags& f) { sub.add_option("--seed", f.seed, "random seed"); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fractional diffusion on the disk: kernels, solutions, densities, moments, CTRW scans"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* dk = app.add_subcommand("dk", "kernel table d_k(t) as CSV");
  add_common(*dk, f);
  dk->add_option("--k-max", f.k_max, "largest k");
  dk->add_option("--times", f.times, "comma-separated times")->delimiter(',');
  dk->add_option("--method", f.method, "auto, closed_form, quadrature or numeric");

  CLI::App* solve = app.add_subcommand("solve", "solution field on a polar grid as CSV");
  add_common(*solve, f);
  solve->add_option("--coeffs", f.coeffs, "real Taylor coefficients a_0,a_1,...")->delimiter(',');
  solve->add_option("--r", f.radii, "radii")->delimiter(',');
  solve->add_option("--phi", f.angles, "angles")->delimiter(',');
  solve->add_option("--times", f.times, "times")->delimiter(',');

  CLI::App* density = app.add_subcommand("density", "wrapped density on a uniform angle grid as CSV");
  add_common(*density, f);
  density->add_option("--t", f.t, "time");
  density->add_option("--grid-points", f.grid_points, "number of angles");

  CLI::App* mom = app.add_subcommand("moments", "circular moments against Monte Carlo as JSON");
  add_common(*mom, f);
  add_seed(*mom, f);
  mom->add_option("--r-list", f.r_list, "moment orders")->delimiter(',');
  mom->add_option("--t-list", f.times, "times")->delimiter(',');
  mom->add_option("--n-paths", f.n_paths, "Monte Carlo paths");
  mom->add_option("--step-dt", f.step_dt, "clock step");

  CLI::App* mixed = app.add_subcommand("mixed", "mixed moment E[B(t) conj(B(s))] as JSON");
  add_common(*mixed, f);
  add_seed(*mixed, f);
  mixed->add_option("--s", f.s, "earlier time");
  mixed->add_option("--t", f.t, "later time");
  mixed->add_option("--n-paths", f.n_paths, "Monte Carlo paths");
  mixed->add_option("--step-dt", f.step_dt, "clock step");

  CLI::App* walk = app.add_subcommand("ctrw", "CTRW convergence scan as JSON");
  add_common(*walk, f);
  add_seed(*walk, f);
  walk->add_option("--scales", f.scales, "scales c")->delimiter(',');
  walk->add_option("--t", f.t, "time");
  walk->add_option("--k-max", f.k_max, "largest k");
  walk->add_option("--n-paths", f.n_paths, "walks per scale");
  walk->add_option("--jump-mode", f.jump_mode, "exact_stable or pareto");
  walk->add_option("--y-mode", f.y_mode, "rademacher or gaussian");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const Json config = resolve_config(command, *sub, f, err);
    if (command == "dk") cmd_dk(config, out, err);
    if (command == "solve") cmd_solve(config, out, err);
    if (command == "density") cmd_density(config, out, err);
    if (command == "moments") cmd_moments(config, out);
    if (command == "mixed") cmd_mixed(config, out);
    if (command == "ctrw") cmd_ctrw(config, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace fracdisk::cli
