#include "fracdisk/solver.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fracdisk/csv.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/specfun.hpp"

namespace fracdisk::solver {
namespace {

void check_disk(cplx z) {
  if (!(std::abs(z) <= 1.0 + 1e-12)) throw DomainError("point lies outside the closed unit disk");
}

// Product-integration value of int_0^{tau_n} (tau_n - s)^{-alpha} (u(s) - u(0)) ds,
// tau_n = n h, for the piecewise-linear interpolant of the nodal values w_j = u(s_j) - u(0).
double fractional_integral(const std::vector<double>& w, std::size_t n, double h, double alpha) {
  const double beta = 1.0 - alpha;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = static_cast<double>(n - j) * h;      // tau - s_j
    const double q = static_cast<double>(n - j - 1) * h;  // tau - s_{j+1}
    const double i0 = (std::pow(p, beta) - std::pow(q, beta)) / beta;
    const double i1 = (std::pow(p, beta + 1.0) - std::pow(q, beta + 1.0)) / (beta + 1.0);
    sum += w[j] * i0 + (w[j + 1] - w[j]) / h * (p * i0 - i1);
  }
  return sum;
}

double caputo_at_step(const std::function<double(double)>& u, double alpha, double t, double h_target) {
  const auto m = static_cast<std::size_t>(std::max(2.0, std::round(t / h_target)));
  const double h = t / static_cast<double>(m);
  std::vector<double> w(m + 2);
  const double u0 = u(0.0);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = u(static_cast<double>(j) * h) - u0;
  const double upper = fractional_integral(w, m + 1, h, alpha);
  const double lower = fractional_integral(w, m - 1, h, alpha);
  return (upper - lower) / (2.0 * h) / std::tgamma(1.0 - alpha);
}

}  // namespace

double TaylorCoeffs::abs_sum() const {
  double s = 0.0;
  for (const cplx& a : coeffs) s += std::abs(a);
  return s;
}

cplx TaylorCoeffs::operator()(cplx z) const {
  cplx sum = 0.0;
  cplx zk = 1.0;
  for (const cplx& a : coeffs) {
    sum += a * zk;
    zk *= z;
  }
  return sum;
}

void validate(const TaylorCoeffs& f) {
  for (const cplx& a : f.coeffs) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw DomainError("Taylor coefficients must be finite");
  }
}

DiskPoint make_disk_point(double r, double phi) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("disk point: r must lie in (0, 1]");
  return {r, wrapped::Angle(phi)};
}

void validate(const NdTaylorCoeffs& f) {
  if (f.dim < 1) throw DomainError("n-D coefficients: dimension must be >= 1");
  for (const auto& [k, a] : f.terms) {
    if (static_cast<int>(k.size()) != f.dim) throw DomainError("n-D coefficients: multi-index of wrong length");
    for (int kj : k) {
      if (kj < 0) throw DomainError("n-D coefficients: negative exponent");
    }
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw DomainError("n-D coefficients must be finite");
  }
}

std::vector<double> nd_k2_values(const NdTaylorCoeffs& f) {
  std::vector<double> out{0.0};
  for (const auto& [k, a] : f.terms) {
    double k2 = 0.0;
    for (int kj : k) k2 += static_cast<double>(kj) * kj;
    out.push_back(k2);
  }
  return out;
}

cplx evaluate_solution(const TaylorCoeffs& f, cplx z, double t, const kernels::KernelTable& table) {
  check_disk(z);
  if (!(t >= 0.0)) throw DomainError("evaluate_solution: t must be >= 0");
  if (t == 0.0) return f(z);
  if (f.coeffs.size() > 1 && table.k_max() < static_cast<int>(f.coeffs.size()) - 1) {
    throw CoverageError("kernel table covers k <= " + std::to_string(table.k_max()) + " but f has degree " +
                        std::to_string(f.coeffs.size() - 1));
  }
  cplx sum = 0.0;
  cplx zk = 1.0;
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    if (f.coeffs[k] != cplx(0.0)) sum += f.coeffs[k] * zk * table.lookup(static_cast<int>(k), t);
    zk *= z;
  }
  return sum;
}

cplx evaluate_solution(const TaylorCoeffs& f, const DiskPoint& z, double t, const kernels::KernelTable& table) {
  return evaluate_solution(f, z.z(), t, table);
}

cplx resolvent(const BernsteinSpec& spec, const TaylorCoeffs& f, cplx z, double theta) {
  check_disk(z);
  cplx sum = 0.0;
  cplx zk = 1.0;
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    sum += f.coeffs[k] * zk * dk_laplace(spec, static_cast<int>(k), theta);
    zk *= z;
  }
  return sum;
}

cplx evaluate_solution_nd(const NdTaylorCoeffs& f, std::span<const cplx> z, double t,
                          const kernels::KernelTable& table) {
  validate(f);
  if (static_cast<int>(z.size()) != f.dim) throw DomainError("evaluate_solution_nd: point of wrong dimension");
  for (const cplx& zj : z) check_disk(zj);
  if (!(t >= 0.0)) throw DomainError("evaluate_solution_nd: t must be >= 0");
  cplx sum = 0.0;
  for (const auto& [k, a] : f.terms) {
    cplx mono = a;
    double k2 = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      for (int p = 0; p < k[j]; ++p) mono *= z[j];
      k2 += static_cast<double>(k[j]) * k[j];
    }
    sum += t == 0.0 ? mono : mono * table.lookup(k2, t);
  }
  return sum;
}

CaputoEstimate caputo_derivative(const std::function<double(double)>& u, double alpha, double t, double h) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("Caputo derivative: alpha must lie in (0, 1)");
  if (!(t > 0.0)) throw DomainError("Caputo derivative: t must be positive");
  if (!(h > 0.0 && h < t / 2.0)) throw DomainError("Caputo derivative: need 0 < h < t/2");
  const double fine = caputo_at_step(u, alpha, t, h);
  const double coarse = caputo_at_step(u, alpha, t, 2.0 * h);
  const double diff = std::fabs(fine - coarse);
  if (diff > 0.1 * std::fabs(fine) && diff > 1e-12) {
    throw ConvergenceError("Caputo derivative: steps h and 2h disagree by more than 10%; reduce h", diff);
  }
  return {fine, diff};
}

double caputo_derivative_numeric(const std::function<double(double)>& u, double alpha, double t, double h) {
  return caputo_derivative(u, alpha, t, h).value;
}

ModeResidual mode_residual(double alpha, int k, double t, double h) {
  ModeResidual r;
  const double d = kernels::dk_stable(alpha, k, t);
  const CaputoEstimate c =
      caputo_derivative([&](double s) { return kernels::dk_stable(alpha, k, s); }, alpha, t, h);
  r.caputo = c.value;
  r.error_estimate = c.error_estimate;
  r.generator = -0.5 * k * k * d;
  r.residual = std::fabs(r.caputo - r.generator);
  r.relative = r.residual / d;
  return r;
}

double pde_residual(const BernsteinSpec& spec, const TaylorCoeffs& f, cplx z, double t, double h) {
  if (spec.family() != Family::Stable || spec.is_classical() || spec.drift_b() != 0.0) {
    throw DomainError("pde_residual: needs a stable clock with 0 < alpha < 1 and no drift");
  }
  check_disk(z);
  cplx sum = 0.0;
  cplx zk = 1.0;
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    if (k > 0 && f.coeffs[k] != cplx(0.0)) {
      const ModeResidual m = mode_residual(spec.alpha(), static_cast<int>(k), t, h);
      sum += f.coeffs[k] * zk * (m.caputo - m.generator);
    }
    zk *= z;
  }
  return std::abs(sum);
}

double fundamental_density_stable(double alpha, double x, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("fundamental density: alpha must lie in (0, 1]");
  if (!(t > 0.0)) throw DomainError("fundamental density: t must be positive");
  if (!std::isfinite(x)) throw DomainError("fundamental density: x must be finite");
  const double scale = std::pow(t, -alpha / 2.0);
  return scale / std::numbers::sqrt2 * specfun::mainardi_m(alpha / 2.0, std::numbers::sqrt2 * std::fabs(x) * scale);
}

void write_field_csv_header(std::ostream& os) { os << "r,phi,t,re_u,im_u\n"; }

void write_field_csv_row(std::ostream& os, double r, double phi, double t, cplx u) {
  os << csv::num(r) << ',' << csv::num(phi) << ',' << csv::num(t) << ',' << csv::num(u.real()) << ','
     << csv::num(u.imag()) << '\n';
}

}  // namespace fracdisk::solver
