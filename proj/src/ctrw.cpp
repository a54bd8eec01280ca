#include "fracdisk/ctrw.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "fracdisk/errors.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/mc.hpp"
#include "fracdisk/specfun.hpp"
#include "fracdisk/subsim.hpp"

namespace fracdisk::ctrw {

std::string jump_mode_name(JumpMode m) { return m == JumpMode::ExactStable ? "exact_stable" : "pareto"; }

JumpMode parse_jump_mode(const std::string& name) {
  if (name == "exact_stable") return JumpMode::ExactStable;
  if (name == "pareto") return JumpMode::Pareto;
  throw ConfigError("unknown jump mode '" + name + "' (expected exact_stable or pareto)");
}

std::string y_mode_name(YMode m) { return m == YMode::Rademacher ? "rademacher" : "gaussian"; }

YMode parse_y_mode(const std::string& name) {
  if (name == "rademacher") return YMode::Rademacher;
  if (name == "gaussian") return YMode::Gaussian;
  throw ConfigError("unknown jump law '" + name + "' (expected rademacher or gaussian)");
}

void validate(const CtrwConfig& config) {
  if (!(config.scale_c >= 1.0) || !std::isfinite(config.scale_c)) throw DomainError("ctrw: scale c must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw DomainError("ctrw: alpha must lie in (0, 1)");
  if (!(config.mu >= 0.0) || !std::isfinite(config.mu)) throw DomainError("ctrw: mu must be >= 0");
  if (config.jump_mode == JumpMode::Pareto && config.mu != 0.0) {
    throw DomainError("ctrw: Pareto waiting times are untempered; use mu = 0 or exact_stable");
  }
}

BernsteinSpec limit_spec(const CtrwConfig& config) {
  return config.mu == 0.0 ? BernsteinSpec::stable(config.alpha) : BernsteinSpec::tempered(config.alpha, config.mu);
}

CtrwSample simulate_ctrw_counted(const CtrwConfig& config, double t, const RngStream& stream,
                                 const CtrwHooks& hooks) {
  validate(config);
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("ctrw: t must be positive");
  const BernsteinSpec spec = limit_spec(config);
  const double span = 1.0 / config.scale_c;
  const double x0 = std::pow(config.scale_c * std::tgamma(1.0 - config.alpha), -1.0 / config.alpha);
  Rng waits(stream, Channel::Jumps);
  CtrwSample out;
  double h = 0.0;
  for (;;) {
    double j = 1.0;
    if (!hooks.unit_waiting) {
      j = config.jump_mode == JumpMode::ExactStable ? subsim::sample_family_increment(spec, span, waits)
                                                    : x0 * std::pow(waits.uniform(), -1.0 / config.alpha);
    }
    h += j;
    if (h > t) break;
    if (++out.count > kMaxRenewals) throw CoverageError("ctrw: more than 1e8 renewals before t; reduce c or t");
  }
  if (hooks.zero_jumps || out.count == 0) return out;
  Rng jumps(stream, Channel::Auxiliary);
  std::mt19937_64 engine(jumps.next_u64());
  double sum = 0.0;
  if (config.y_mode == YMode::Rademacher) {
    std::binomial_distribution<std::uint64_t> heads(out.count, 0.5);
    const double up = static_cast<double>(heads(engine));
    sum = (2.0 * up - static_cast<double>(out.count)) / std::sqrt(config.scale_c);
  } else {
    sum = std::sqrt(static_cast<double>(out.count) / config.scale_c) * jumps.normal();
  }
  out.angle = wrapped::Angle(sum);
  return out;
}

wrapped::Angle simulate_ctrw(const CtrwConfig& config, double t, const RngStream& stream, const CtrwHooks& hooks) {
  return simulate_ctrw_counted(config, t, stream, hooks).angle;
}

std::vector<CtrwSample> simulate_ctrw_many(const CtrwConfig& config, double t, std::size_t n,
                                           const RngStream& stream, const CtrwHooks& hooks) {
  std::vector<CtrwSample> out(n);
  mc::parallel_for(n, [&](std::size_t i) { out[i] = simulate_ctrw_counted(config, t, stream.child(i), hooks); });
  return out;
}

double conditional_moment(const CtrwConfig& config, int k, std::uint64_t count) {
  const double n = static_cast<double>(count);
  if (config.y_mode == YMode::Rademacher) return std::pow(std::cos(k / std::sqrt(config.scale_c)), n);
  return std::exp(-static_cast<double>(k) * k * n / (2.0 * config.scale_c));
}

double exact_ctrw_moment(const CtrwConfig& config, int k, double t) {
  validate(config);
  if (config.jump_mode != JumpMode::ExactStable || config.mu != 0.0) {
    throw DomainError("exact_ctrw_moment: needs exact_stable waiting times and mu = 0");
  }
  if (!(t > 0.0)) throw DomainError("exact_ctrw_moment: t must be positive");
  const double alpha = config.alpha;
  const double rho = conditional_moment(config, k, 1);
  if (rho == 1.0) return 1.0;
  // Beyond w_max the M-Wright tail is below 1e-20.
  double w_max = 1.0;
  while (specfun::mainardi_m(alpha, w_max) > 1e-20) w_max += 1.0;
  // G(w) = int_w^inf M_alpha on panels of width h0, interpolated by cubic
  // Hermite with G' = -M (interpolation error below 1e-10).
  constexpr double h0 = 0.01;
  const auto panels = static_cast<std::size_t>(std::ceil(w_max / h0));
  std::vector<double> g(panels + 1, 0.0);
  std::vector<double> dm(panels + 1, 0.0);
  auto m = [&](double w) { return specfun::mainardi_m(alpha, w); };
  for (std::size_t i = 0; i <= panels; ++i) dm[i] = m(static_cast<double>(i) * h0);
  for (std::size_t i = panels; i-- > 0;) {
    g[i] = g[i + 1] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                          m, static_cast<double>(i) * h0, static_cast<double>(i + 1) * h0, 0);
  }
  auto tail = [&](double w) {
    const double x = w / h0;
    const auto i = static_cast<std::size_t>(x);
    if (i >= panels) return 0.0;
    const double u = x - static_cast<double>(i);
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * g[i] + h01 * g[i + 1] - h0 * (h10 * dm[i] + h11 * dm[i + 1]);
  };
  // sum_{n>=1} rho^{n-1} P(N >= n), P(N >= n) = G(n / (c t^alpha)).
  const double step = 1.0 / (config.scale_c * std::pow(t, alpha));
  const auto n_max = static_cast<std::uint64_t>(std::ceil(w_max / step));
  if (n_max > kMaxRenewals) throw CoverageError("exact_ctrw_moment: too many renewal terms");
  double sum = 0.0;
  double power = 1.0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    sum += power * tail(static_cast<double>(n) * step);
    power *= rho;
    if (std::fabs(power) < 1e-300) break;
  }
  return 1.0 - (1.0 - rho) * sum;
}

std::vector<wrapped::CircularMoment> empirical_circular_moments(std::span<const double> angles, int k_max) {
  if (angles.empty()) throw DomainError("empirical_circular_moments: empty sample");
  if (k_max < 0) throw DomainError("empirical_circular_moments: k_max must be >= 0");
  std::vector<wrapped::CircularMoment> out;
  for (int k = 0; k <= k_max; ++k) out.push_back(wrapped::circular_fourier(angles, k));
  return out;
}

namespace {

// Least-squares slope of -log error against log c.
double decay_exponent(std::span<const double> scales, std::span<const double> err) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(scales.size());
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const double x = std::log(scales[s]);
    const double y = std::log(std::max(err[s], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  return denom > 0.0 ? -(m * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

bool ConvergenceReport::all_monotone() const {
  for (bool m : monotone) {
    if (!m) return false;
  }
  return true;
}

ConvergenceReport convergence_report(const CtrwConfig& base, double t, int k_max, std::span<const double> scales,
                                     std::size_t n, const RngStream& stream) {
  if (k_max < 1) throw DomainError("convergence_report: k_max must be >= 1");
  if (scales.empty()) throw DomainError("convergence_report: need at least one scale");
  if (n < 2) throw DomainError("convergence_report: need at least two walks");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] > scales[i - 1])) throw DomainError("convergence_report: scales must be increasing");
  }
  const BernsteinSpec spec = limit_spec(base);
  const bool exact = base.jump_mode == JumpMode::ExactStable && base.mu == 0.0;
  ConvergenceReport report;
  report.t = t;
  report.scales.assign(scales.begin(), scales.end());
  std::vector<double> dk(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) dk[static_cast<std::size_t>(k)] = kernels::dk(spec, static_cast<double>(k) * k, t);
  for (std::size_t s = 0; s < scales.size(); ++s) {
    CtrwConfig config = base;
    config.scale_c = scales[s];
    const std::vector<CtrwSample> walks = simulate_ctrw_many(config, t, n, stream.child(s));
    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) angles[i] = walks[i].angle.value();
    std::vector<double> cond(n);
    for (int k = 0; k <= k_max; ++k) {
      for (std::size_t i = 0; i < n; ++i) cond[i] = conditional_moment(config, k, walks[i].count);
      const mc::Estimate e = mc::summarize(cond);
      ConvergenceRow row;
      row.c = scales[s];
      row.k = k;
      row.empirical_re = e.mean;
      row.se = e.se;
      row.dk = dk[static_cast<std::size_t>(k)];
      row.abs_error = std::fabs(e.mean - row.dk);
      row.raw = wrapped::circular_fourier(angles, k);
      row.exact = std::numeric_limits<double>::quiet_NaN();
      row.exact_error = std::numeric_limits<double>::quiet_NaN();
      if (exact) {
        row.exact = exact_ctrw_moment(config, k, t);
        row.exact_error = std::fabs(row.exact - row.dk);
      }
      report.rows.push_back(row);
    }
  }
  const std::size_t per_scale = static_cast<std::size_t>(k_max) + 1;
  auto row_at = [&](std::size_t s, int k) -> const ConvergenceRow& {
    return report.rows[s * per_scale + static_cast<std::size_t>(k)];
  };
  double gamma_sum = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    bool mono = true;
    for (std::size_t s = 1; s < scales.size(); ++s) {
      const ConvergenceRow& a = row_at(s - 1, k);
      const ConvergenceRow& b = row_at(s, k);
      if (b.abs_error > a.abs_error + 2.0 * std::hypot(a.se, b.se)) mono = false;
    }
    report.monotone.push_back(mono);
    std::vector<double> err;
    std::vector<double> exact_err;
    for (std::size_t s = 0; s < scales.size(); ++s) {
      err.push_back(row_at(s, k).abs_error);
      exact_err.push_back(row_at(s, k).exact_error);
    }
    const double gamma = decay_exponent(scales, err);
    report.gamma.push_back(gamma);
    if (exact) report.exact_gamma.push_back(decay_exponent(scales, exact_err));
    gamma_sum += gamma;
  }
  report.gamma_mean = gamma_sum / k_max;
  return report;
}

nlohmann::ordered_json to_json(const ConvergenceRow& row) {
  nlohmann::ordered_json j;
  j["c"] = row.c;
  j["k"] = row.k;
  j["empirical_re"] = row.empirical_re;
  j["empirical_im"] = row.empirical_im;
  j["se"] = row.se;
  j["dk"] = row.dk;
  j["abs_error"] = row.abs_error;
  j["raw_re"] = row.raw.value.real();
  j["raw_im"] = row.raw.value.imag();
  j["raw_se_re"] = row.raw.se_re;
  j["raw_se_im"] = row.raw.se_im;
  if (std::isfinite(row.exact)) {
    j["exact"] = row.exact;
    j["exact_error"] = row.exact_error;
  }
  return j;
}

nlohmann::ordered_json to_json(const ConvergenceReport& report) {
  nlohmann::ordered_json j;
  j["t"] = report.t;
  j["scales"] = report.scales;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ConvergenceRow& row : report.rows) j["rows"].push_back(to_json(row));
  j["gamma"] = report.gamma;
  j["gamma_mean"] = report.gamma_mean;
  j["monotone"] = report.monotone;
  j["all_monotone"] = report.all_monotone();
  if (!report.exact_gamma.empty()) j["exact_gamma"] = report.exact_gamma;
  return j;
}

}  // namespace fracdisk::ctrw
