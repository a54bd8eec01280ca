#include "fracdisk/moments.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "fracdisk/errors.hpp"
#include "fracdisk/mc.hpp"
#include "fracdisk/specfun.hpp"
#include "fracdisk/subsim.hpp"

namespace fracdisk::moments {
namespace {

void check_theta(double theta1, double theta2) {
  if (!(theta1 > 0.0) || !(theta2 > 0.0)) throw DomainError("Laplace variables must be positive");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

double sd_over_root_n(const std::vector<double>& x) { return mc::summarize(x).se; }

// Standard errors of the real and imaginary parts of the mean of psi.
std::pair<double, double> complex_se(const std::vector<cplx>& psi) {
  std::vector<double> re(psi.size());
  std::vector<double> im(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    re[i] = psi[i].real();
    im[i] = psi[i].imag();
  }
  return {sd_over_root_n(re), sd_over_root_n(im)};
}

void check_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) throw DomainError("surface grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("surface grid must be strictly increasing");
  }
}

}  // namespace

void MomentReport::adjudicate(double k_se, double allowance) {
  pass = std::fabs(analytic - mc) <= k_se * se + allowance;
}

nlohmann::ordered_json to_json(const MomentReport& r) {
  nlohmann::ordered_json j;
  j["quantity"] = r.quantity;
  j["params"] = r.params;
  j["analytic"] = r.analytic;
  j["mc"] = r.mc;
  j["se"] = r.se;
  j["pass"] = r.pass;
  return j;
}

double circular_moment(const kernels::KernelTable& table, int r, double t) {
  if (r < 0) throw DomainError("circular_moment: r must be >= 0");
  if (!(t >= 0.0)) throw DomainError("circular_moment: t must be >= 0");
  if (t == 0.0 || r == 0) return 1.0;
  if (!table.covers(static_cast<double>(r) * r, t)) {
    throw CoverageError("circular_moment: table does not cover r = " + std::to_string(r));
  }
  return table.lookup(r, t);
}

double moment_laplace_paper(const BernsteinSpec& spec, double r, double theta) {
  if (!(theta > 0.0)) throw DomainError("moment_laplace_paper: theta must be positive");
  const double g = laplace_exponent(spec, theta);
  return 2.0 * g / (theta * (r + 2.0 * g));
}

double joint_exp_laplace(const BernsteinSpec& spec, double eta1, double eta2, double theta1, double theta2) {
  check_theta(theta1, theta2);
  if (!(eta1 >= 0.0) || !(eta2 >= 0.0)) throw DomainError("joint_exp_laplace: eta must be >= 0");
  const double g1 = laplace_exponent(spec, theta1);
  const double g2 = laplace_exponent(spec, theta2);
  const double g12 = laplace_exponent(spec, theta1 + theta2);
  const double tt = theta1 * theta2;
  const double single = (g1 / (eta1 + g1) + g2 / (eta2 + g2) - 1.0) / tt;
  const double cross =
      eta1 * eta2 / tt * (eta1 + eta2 + g1 + g2) / ((eta1 + eta2 + g12) * (eta1 + g1) * (eta2 + g2));
  return single + cross;
}

double covariance_laplace(const BernsteinSpec& spec, double theta1, double theta2) {
  check_theta(theta1, theta2);
  const double g1 = laplace_exponent(spec, theta1);
  const double g2 = laplace_exponent(spec, theta2);
  const double g12 = laplace_exponent(spec, theta1 + theta2);
  const double num = 4.0 * g1 * g2 * (g12 + 2.0) + 3.0 * (g1 + g2 - g12);
  return num / (theta1 * theta2 * (2.0 + g12) * (3.0 + 2.0 * g1) * (1.0 + 2.0 * g2));
}

SymmetryScan covariance_symmetry_scan(const BernsteinSpec& spec, double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw DomainError("symmetry scan: need 0 < lo < hi and points >= 2");
  SymmetryScan out;
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    for (int j = i + 1; j < points; ++j) {
      const double a = lo * std::exp(step * i);
      const double b = lo * std::exp(step * j);
      const double cab = covariance_laplace(spec, a, b);
      const double rel = std::fabs(cab - covariance_laplace(spec, b, a)) / std::fabs(cab);
      if (rel > out.max_relative_asymmetry) out = {rel, a, b};
    }
  }
  return out;
}

MomentReport mixed_moment_mc(const BernsteinSpec& spec, double s, double t, std::size_t n_paths, double step_dt,
                             const RngStream& stream) {
  if (!(s >= 0.0) || !(t >= s)) throw DomainError("mixed_moment_mc: need 0 <= s <= t");
  if (n_paths < 2) throw DomainError("mixed_moment_mc: need at least two paths");
  const std::vector<double> times{s, t};
  std::vector<double> x(n_paths);
  mc::parallel_for(n_paths, [&](std::size_t i) {
    const RngStream child = stream.child(i);
    const std::vector<double> b = subsim::sample_timechanged_bm(spec, times, step_dt, child);
    x[i] = std::cos(b[1] - b[0]);
  });
  const mc::Estimate e = mc::summarize(x);
  MomentReport r;
  r.quantity = "mixed_moment";
  r.params = {{"s", s}, {"t", t}, {"n_paths", n_paths}, {"step_dt", step_dt}};
  r.mc = e.mean;
  r.se = e.se;
  return r;
}

SeriesValue mixed_moment_stable_series(double alpha, double s, double t, int j_max, BetaOrder order) {
  check_alpha(alpha);
  if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("mixed_moment_stable: s and t must be >= 0");
  if (j_max < 1) throw DomainError("mixed_moment_stable: j_max must be >= 1");
  const double big = std::max(s, t);
  const double small = std::min(s, t);
  if (big == 0.0) return {1.0, 0.0, 0};
  const double y = std::pow(big, alpha) / 2.0;
  const double x = small / big;
  const double lead = specfun::mittag_leffler(alpha, -y);
  SeriesValue out;
  if (x == 0.0) {
    out.value = lead;
    return out;
  }
  const double pre = y / std::tgamma(alpha);
  // Bounds on the incomplete beta factor, uniform in j.
  const double beta_cap = order == BetaOrder::Derived ? std::pow(x, alpha) / alpha
                                                      : (1.0 - std::pow(1.0 - x, alpha)) / alpha;
  double sum = 0.0;
  double abs_sum = 0.0;
  for (int j = 0; j < j_max; ++j) {
    const double aj = alpha * j + 1.0;
    const double coef = std::exp(j * std::log(y) - std::lgamma(aj));
    const double b = order == BetaOrder::Derived ? boost::math::beta(alpha, aj, x) : boost::math::beta(aj, alpha, x);
    const double term = (j % 2 == 0 ? coef : -coef) * b;
    sum += term;
    abs_sum += std::fabs(term);
    out.terms = j + 1;
    // Once the coefficient ratio is below 1/2, the tail is at most twice the next coefficient.
    const double next = std::exp((j + 1) * std::log(y) - std::lgamma(aj + alpha));
    const double ratio = next / coef;
    if (ratio < 0.5) {
      out.tail_bound = pre * 2.0 * next * beta_cap;
      if (out.tail_bound < 1e-17) break;
    } else {
      out.tail_bound = INFINITY;
    }
  }
  if (!(out.tail_bound < 1e-12)) {
    throw ConvergenceError("mixed_moment_stable: series not converged after " + std::to_string(j_max) + " terms",
                           out.tail_bound);
  }
  if (abs_sum > 1e8 * std::max(std::fabs(sum), 1e-300)) {
    throw AccuracyLossError("mixed_moment_stable: cancellation in the series", abs_sum / std::fabs(sum));
  }
  out.value = lead + pre * sum;
  return out;
}

double mixed_moment_stable(double alpha, double s, double t, int j_max) {
  const double v = mixed_moment_stable_series(alpha, s, t, j_max).value;
  if (s == t && std::fabs(v - 1.0) > 1e-8) {
    throw InvariantError("mixed_moment_stable: value at s = t is " + std::to_string(v) + ", expected 1");
  }
  return v;
}

double mixed_moment_integral(const BernsteinSpec& spec, double s, double t, double quad_tol) {
  if (spec.family() != Family::Stable || spec.drift_b() != 0.0) {
    throw DomainError("mixed_moment_integral: needs a stable clock without drift");
  }
  if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("mixed_moment_integral: s and t must be >= 0");
  const double alpha = spec.alpha();
  const double big = std::max(s, t);
  const double small = std::min(s, t);
  const double lead = specfun::mittag_leffler(alpha, -std::pow(big, alpha) / 2.0);
  if (small == 0.0) return lead;
  auto f = [&](double u) {
    const double gap = std::max(0.0, big - std::pow(u, 1.0 / alpha));
    return specfun::mittag_leffler(alpha, -std::pow(gap, alpha) / 2.0);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double integral = integrator.integrate(f, 0.0, std::pow(small, alpha), quad_tol, &err, &l1);
  if (!std::isfinite(integral) || err > std::max(1e-8, 100.0 * quad_tol) * std::max(1.0, l1)) {
    throw ConvergenceError("mixed_moment_integral: quadrature did not converge", err);
  }
  return lead + integral / (2.0 * std::tgamma(alpha + 1.0));
}

namespace {

struct Ds {
  double d1 = 1.0;   // E exp(-E/2)
  double d2 = 1.0;   // E exp(-2E)
  double d11 = 1.0;  // E exp(-E)
};

Ds read_ds(const kernels::KernelTable& table, double t, bool need_d2, bool need_d11) {
  if (!(t >= 0.0)) throw DomainError("nd_covariance: t must be >= 0");
  Ds d;
  if (t == 0.0) return d;
  auto get = [&](double k2) {
    if (!table.covers(k2, t)) {
      throw CoverageError("nd_covariance: table lacks k2 = " + std::to_string(k2) + " at the requested t");
    }
    return table.lookup(k2, t);
  };
  d.d1 = get(1.0);
  if (need_d2) d.d2 = get(4.0);
  if (need_d11) d.d11 = get(2.0);
  return d;
}

void check_point(std::span<const cplx> z) {
  if (z.empty()) throw DomainError("nd_covariance: empty point");
  for (const cplx& v : z) {
    if (!(std::abs(v) <= 1.0 + 1e-12)) throw DomainError("nd_covariance: coordinates must lie in the closed disk");
  }
}

}  // namespace

Matrix nd_covariance(const kernels::KernelTable& table, std::span<const cplx> z, double t) {
  check_point(z);
  const Ds d = read_ds(table, t, z.size() > 1, false);
  const std::size_t n = z.size();
  Matrix q(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      q[i][j] = i == j ? z[i] * z[i] * (1.0 - d.d1 * d.d1) : z[i] * z[j] * (d.d2 - d.d1 * d.d1);
    }
  }
  return q;
}

Matrix nd_covariance_independent(const kernels::KernelTable& table, std::span<const cplx> z, double t) {
  check_point(z);
  const Ds d = read_ds(table, t, false, z.size() > 1);
  const std::size_t n = z.size();
  Matrix q(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      q[i][j] = i == j ? std::norm(z[i]) * (1.0 - d.d1 * d.d1) : z[i] * std::conj(z[j]) * (d.d11 - d.d1 * d.d1);
    }
  }
  return q;
}

MatrixEstimate nd_covariance_mc(const BernsteinSpec& spec, std::span<const cplx> z, double t, std::size_t n_paths,
                                double step_dt, const RngStream& stream, Coupling coupling, Product product) {
  check_point(z);
  if (n_paths < 2) throw DomainError("nd_covariance_mc: need at least two paths");
  if (!(t >= 0.0)) throw DomainError("nd_covariance_mc: t must be >= 0");
  const std::size_t n = z.size();
  std::vector<std::vector<cplx>> x(n, std::vector<cplx>(n_paths));
  const std::vector<double> times{t};
  mc::parallel_for(n_paths, [&](std::size_t p) {
    const RngStream child = stream.child(p);
    const double e = subsim::sample_inverse(spec, times, step_dt, child)[0];
    Rng rng(child, Channel::Brownian);
    const double root = std::sqrt(e);
    const double shared = root * rng.normal();
    for (std::size_t j = 0; j < n; ++j) {
      const double b = coupling == Coupling::Shared ? shared : (j == 0 ? shared : root * rng.normal());
      x[j][p] = z[j] * std::polar(1.0, -b);
    }
  });
  std::vector<cplx> m(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s = 0.0;
    for (const cplx& v : x[j]) s += v;
    m[j] = s / static_cast<double>(n_paths);
  }
  MatrixEstimate out;
  out.mean.assign(n, std::vector<cplx>(n));
  out.se_re.assign(n, std::vector<double>(n));
  out.se_im.assign(n, std::vector<double>(n));
  std::vector<cplx> psi(n_paths);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool plain = product == Product::OffDiagPlain && i != j;
      cplx mean = 0.0;
      for (std::size_t p = 0; p < n_paths; ++p) {
        const cplx xj = plain ? x[j][p] : std::conj(x[j][p]);
        const cplx mj = plain ? m[j] : std::conj(m[j]);
        mean += x[i][p] * xj;
        psi[p] = x[i][p] * xj - m[i] * xj - x[i][p] * mj;
      }
      const cplx mj = plain ? m[j] : std::conj(m[j]);
      out.mean[i][j] = mean / static_cast<double>(n_paths) - m[i] * mj;
      const auto [sr, si] = complex_se(psi);
      out.se_re[i][j] = sr;
      out.se_im[i][j] = si;
    }
  }
  return out;
}

namespace {

// Accumulates f(i, j) = a[min(i,j)] c[max(i,j)] (symmetric) or a[i] c[j] over paths.
Surface accumulate_surface(std::span<const double> grid, const std::vector<std::vector<double>>& e,
                           std::size_t n_paths, double eta_first, double eta_second, bool symmetric) {
  const std::size_t n = grid.size();
  Surface out;
  out.grid.assign(grid.begin(), grid.end());
  std::vector<double> sum(n * n, 0.0);
  std::vector<double> sumsq(n * n, 0.0);
  std::vector<double> a(n);
  std::vector<double> c(n);
  for (std::size_t p = 0; p < n_paths; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::exp(-eta_first * e[i][p]);
      c[i] = std::exp(-eta_second * e[i][p]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double v = symmetric ? a[std::min(i, j)] * c[std::max(i, j)] : a[i] * c[j];
        sum[i * n + j] += v;
        sumsq[i * n + j] += v * v;
      }
    }
  }
  const double np = static_cast<double>(n_paths);
  out.mean.resize(n * n);
  out.se.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) {
    const double mean = sum[k] / np;
    out.mean[k] = mean;
    out.se[k] = std::sqrt(std::max(0.0, sumsq[k] / np - mean * mean) / (np - 1.0));
  }
  return out;
}

}  // namespace

Surface exp_functional_surface(const BernsteinSpec& spec, double eta1, double eta2, std::span<const double> grid,
                               std::size_t n_paths, double step_dt, const RngStream& stream) {
  check_grid(grid);
  if (n_paths < 2) throw DomainError("surface: need at least two paths");
  const auto e = subsim::sample_inverse_paths(spec, grid, n_paths, step_dt, stream);
  return accumulate_surface(grid, e, n_paths, eta1, eta2, false);
}

Surface product_moment_surface(const BernsteinSpec& spec, std::span<const double> grid, std::size_t n_paths,
                               double step_dt, const RngStream& stream) {
  check_grid(grid);
  if (n_paths < 2) throw DomainError("surface: need at least two paths");
  const auto e = subsim::sample_inverse_paths(spec, grid, n_paths, step_dt, stream);
  return accumulate_surface(grid, e, n_paths, 1.5, 0.5, true);
}

std::vector<ConventionRow> convention_adjudication(const BernsteinSpec& spec, std::span<const int> r_list, double t,
                                                   std::size_t n_paths, double step_dt, const RngStream& stream) {
  if (!(t > 0.0)) throw DomainError("convention_adjudication: t must be positive");
  if (n_paths < 2) throw DomainError("convention_adjudication: need at least two paths");
  const std::vector<double> times{t};
  std::vector<double> theta(n_paths);
  mc::parallel_for(n_paths, [&](std::size_t p) {
    theta[p] = subsim::sample_timechanged_bm(spec, times, step_dt, stream.child(p))[0];
  });
  std::vector<ConventionRow> rows;
  for (int r : r_list) {
    if (r < 1) throw DomainError("convention_adjudication: r must be >= 1");
    ConventionRow row;
    row.r = r;
    row.t = t;
    // exp_functional_laplace at eta is the kernel transform at k2 = 2 eta.
    row.inverted_r2 = kernels::dk_numeric_k2(spec, static_cast<double>(r) * r, t);
    row.inverted_r = kernels::dk_numeric_k2(spec, static_cast<double>(r), t);
    std::vector<double> c(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) c[p] = std::cos(r * theta[p]);
    const mc::Estimate e = mc::summarize(c);
    row.mc = e.mean;
    row.se = e.se;
    // The clock is overestimated by at most step_dt, moving exp(-eta E) by at most eta step_dt.
    const double allowance = 0.5 * r * r * step_dt;
    row.r2_pass = std::fabs(row.inverted_r2 - row.mc) <= 3.0 * row.se + allowance;
    row.r_pass = std::fabs(row.inverted_r - row.mc) <= 3.0 * row.se + allowance;
    rows.push_back(row);
  }
  return rows;
}

nlohmann::ordered_json to_json(const ConventionRow& row) {
  nlohmann::ordered_json j;
  j["r"] = row.r;
  j["t"] = row.t;
  j["inverted_r2"] = row.inverted_r2;
  j["inverted_r"] = row.inverted_r;
  j["mc"] = row.mc;
  j["se"] = row.se;
  j["r2_pass"] = row.r2_pass;
  j["r_pass"] = row.r_pass;
  return j;
}

}  // namespace fracdisk::moments
