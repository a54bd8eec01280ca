#include "fracdisk/kernels.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracdisk/csv.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/mc.hpp"
#include "fracdisk/specfun.hpp"

namespace fracdisk::kernels {
namespace {

void check_k2_t(double k2, double t) {
  if (!(k2 >= 0.0) || !std::isfinite(k2)) throw DomainError("kernel: k^2 must be finite and >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("kernel: t must be finite and >= 0");
}

double k_squared(int k) {
  if (k < 0) throw DomainError("kernel: k must be >= 0");
  return static_cast<double>(k) * k;
}

// Gamma(a, x) for x >= 0, a > 0.
double upper_gamma0(double a, double x) { return x <= 0.0 ? std::tgamma(a) : boost::math::tgamma(a, x); }

double tolerance_of(Method m) {
  switch (m) {
    case Method::ClosedForm: return 1e-12;
    case Method::Quadrature: return 1e-7;
    default: return 1e-6;
  }
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::ClosedForm: return "closed_form";
    case Method::Quadrature: return "quadrature";
    case Method::Numeric: return "numeric";
  }
  return "auto";
}

Method parse_method(const std::string& name) {
  if (name == "auto") return Method::Auto;
  if (name == "closed_form") return Method::ClosedForm;
  if (name == "quadrature") return Method::Quadrature;
  if (name == "numeric") return Method::Numeric;
  throw ConfigError("unknown kernel method '" + name + "' (expected auto, closed_form, quadrature or numeric)");
}

double dk_stable(double alpha, int k, double t) { return dk_stable_k2(alpha, k_squared(k), t); }

double dk_stable_k2(double alpha, double k2, double t) {
  check_k2_t(k2, t);
  if (k2 == 0.0 || t == 0.0) return 1.0;
  return specfun::mittag_leffler(alpha, -0.5 * k2 * std::pow(t, alpha));
}

double dk_tempered(double alpha, double mu, int k, double t, double quad_tol) {
  return dk_tempered_k2(alpha, mu, k_squared(k), t, quad_tol);
}

double dk_tempered_k2(double alpha, double mu, double k2, double t, double quad_tol) {
  check_k2_t(k2, t);
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("dk_tempered: alpha must lie in (0, 1)");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("dk_tempered: mu must be finite and >= 0");
  if (!(quad_tol > 0.0)) throw DomainError("dk_tempered: quad_tol must be positive");
  if (k2 == 0.0 || t == 0.0) return 1.0;

  const double c = std::pow(mu, alpha) - 0.5 * k2;
  const double gamma_a = std::tgamma(alpha);
  const double inv_alpha = 1.0 / alpha;
  auto integrand = [&](double u) {
    const double z = std::pow(u, inv_alpha);
    const double rest = std::max(t - z, 0.0);
    return upper_gamma0(alpha, mu * rest) * std::exp(-mu * z) * specfun::mittag_leffler2(alpha, alpha, c * u);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double upper = std::pow(t, alpha);
  const double integral = integrator.integrate(integrand, 0.0, upper, 1e-12, &error, &l1);
  const double scale = std::fabs(c) / (alpha * gamma_a);
  if (!std::isfinite(integral) || error * scale > quad_tol) {
    throw ConvergenceError("dk_tempered: quadrature did not reach the requested tolerance", error * scale);
  }
  return upper_gamma0(alpha, mu * t) / gamma_a + c * inv_alpha / gamma_a * integral;
}

double dk_numeric(const BernsteinSpec& spec, int k, double t, int inv_terms) {
  return dk_numeric_k2(spec, k_squared(k), t, inv_terms);
}

double dk_numeric_k2(const BernsteinSpec& spec, double k2, double t, int inv_terms) {
  check_k2_t(k2, t);
  if (t == 0.0) return 1.0;
  if (inv_terms < 6) throw DomainError("dk_numeric: inv_terms must be >= 6");
  using laplace::HighPrecision;
  auto transform = [&](const HighPrecision& theta) { return dk_laplace_t<HighPrecision>(spec, k2, theta); };
  const HighPrecision tt = t;
  double previous = static_cast<double>(laplace::gaver_stehfest_hp(transform, tt, inv_terms));
  double gap = std::numeric_limits<double>::infinity();
  for (int n = inv_terms + 8; n <= kMaxNumericTerms; n += 8) {
    const double current = static_cast<double>(laplace::gaver_stehfest_hp(transform, tt, n));
    gap = std::fabs(current - previous) / std::max(std::fabs(current), 1e-300);
    previous = current;
    if (gap <= 1e-10) break;
  }
  if (!std::isfinite(previous) || gap > 1e-5) {
    throw InversionError("dk_numeric: Gaver-Stehfest estimates did not settle (relative gap " +
                             std::to_string(gap) + ")",
                         gap);
  }
  return previous;
}

Method resolve_method(const BernsteinSpec& spec, Method requested) {
  const bool drift = spec.drift_b() > 0.0;
  switch (requested) {
    case Method::Auto:
      if (drift) return Method::Numeric;
      return spec.family() == Family::Stable ? Method::ClosedForm : Method::Quadrature;
    case Method::ClosedForm:
      if (drift || !spec.behaves_stable()) {
        throw DomainError("closed-form kernel needs a stable clock without drift, got " + spec.describe());
      }
      return requested;
    case Method::Quadrature:
      if (drift || spec.is_classical()) {
        throw DomainError("quadrature kernel needs 0 < alpha < 1 and no drift, got " + spec.describe());
      }
      return requested;
    case Method::Numeric:
      return requested;
  }
  return requested;
}

double dk(const BernsteinSpec& spec, double k2, double t, Method method) {
  switch (resolve_method(spec, method)) {
    case Method::ClosedForm: return dk_stable_k2(spec.alpha(), k2, t);
    case Method::Quadrature: return dk_tempered_k2(spec.alpha(), spec.mu(), k2, t);
    default: return dk_numeric_k2(spec, k2, t);
  }
}

double dk_nd(const BernsteinSpec& spec, std::span<const int> k_vec, double t, Method method) {
  double k2 = 0.0;
  for (int k : k_vec) k2 += k_squared(k);
  return dk(spec, k2, t, method);
}

int KernelTable::k_max() const {
  int k = -1;
  while (static_cast<std::size_t>(k + 1) < k2.size() && near(k2[k + 1], static_cast<double>(k + 1) * (k + 1))) ++k;
  return k;
}

bool KernelTable::covers(double k2_value, double t) const {
  const bool has_k = std::any_of(k2.begin(), k2.end(), [&](double v) { return near(v, k2_value); });
  const bool has_t = std::any_of(times.begin(), times.end(), [&](double v) { return near(v, t); });
  return has_k && has_t;
}

double KernelTable::lookup(double k2_value, double t) const {
  const auto row = std::find_if(k2.begin(), k2.end(), [&](double v) { return near(v, k2_value); });
  const auto col = std::find_if(times.begin(), times.end(), [&](double v) { return near(v, t); });
  if (row == k2.end() || col == times.end()) {
    throw CoverageError("kernel table does not cover k^2 = " + std::to_string(k2_value) +
                        ", t = " + std::to_string(t));
  }
  return at(static_cast<std::size_t>(row - k2.begin()), static_cast<std::size_t>(col - times.begin()));
}

KernelTable build_table(const BernsteinSpec& spec, int k_max, std::span<const double> times, Method method) {
  if (k_max < 0) throw DomainError("build_table: k_max must be >= 0");
  std::vector<double> k2(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) k2[static_cast<std::size_t>(k)] = k_squared(k);
  return build_table_k2(spec, std::move(k2), times, method);
}

KernelTable build_table_k2(const BernsteinSpec& spec, std::vector<double> k2, std::span<const double> times,
                           Method method) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw DomainError("build_table: times must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("build_table: times must be strictly ascending");
  }
  for (double v : k2) check_k2_t(v, 0.0);
  std::sort(k2.begin(), k2.end());
  k2.erase(std::unique(k2.begin(), k2.end()), k2.end());

  KernelTable table;
  table.spec = spec;
  table.k2 = std::move(k2);
  table.times.assign(times.begin(), times.end());
  const Method route = resolve_method(spec, method);
  const std::size_t cols = table.times.size();
  table.values.assign(table.k2.size() * cols, 1.0);
  table.methods.assign(table.k2.size() * cols, route);
  mc::parallel_for(table.values.size(), [&](std::size_t idx) {
    const double kk = table.k2[idx / cols];
    const double t = table.times[idx % cols];
    table.values[idx] = (kk == 0.0 || t == 0.0) ? 1.0 : dk(spec, kk, t, route);
  });
  check_invariants(table);
  return table;
}

void check_invariants(const KernelTable& table) {
  const std::size_t rows = table.k2.size();
  const std::size_t cols = table.times.size();
  auto fail = [&](std::size_t r, std::size_t c, const std::string& why) {
    throw InvariantError("kernel table invariant violated at k = " + csv::num(std::sqrt(table.k2[r])) +
                         ", t = " + csv::num(table.times[c]) + ": " + why);
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = table.at(r, c);
      const double tol = tolerance_of(table.method_at(r, c));
      if (table.k2[r] == 0.0 && v != 1.0) fail(r, c, "d_0 must equal 1");
      if (!(v > 0.0) || v > 1.0 + tol) fail(r, c, "value " + csv::num(v) + " outside (0, 1]");
      if (c > 0 && v > table.at(r, c - 1) + tol) fail(r, c, "increase in t");
      if (r > 0 && v > table.at(r - 1, c) + tol) fail(r, c, "increase in k");
    }
  }
}

void write_table_csv(std::ostream& os, const KernelTable& table) {
  os << "k,t,dk,method\n";
  for (std::size_t r = 0; r < table.k2.size(); ++r) {
    for (std::size_t c = 0; c < table.times.size(); ++c) {
      os << csv::num(std::sqrt(table.k2[r])) << ',' << csv::num(table.times[c]) << ',' << csv::num(table.at(r, c))
         << ',' << method_name(table.method_at(r, c)) << '\n';
    }
  }
}

}  // namespace fracdisk::kernels
