#pragma once

#include <complex>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/wrapped.hpp"

namespace fracdisk::solver {

using cplx = std::complex<double>;

// Taylor coefficients a_0..a_K of an initial datum f(z) = sum a_k z^k.
struct TaylorCoeffs {
  std::vector<cplx> coeffs;
  bool declared_radius_ok = true;

  double abs_sum() const;
  cplx operator()(cplx z) const;
};

// Throws DomainError on non-finite coefficients.
void validate(const TaylorCoeffs& f);

// z = r e^{i phi}, r in (0, 1].
struct DiskPoint {
  double r = 1.0;
  wrapped::Angle phi;

  cplx z() const { return std::polar(r, phi.value()); }
};

DiskPoint make_disk_point(double r, double phi);

// Sparse multivariate coefficients a_{k_1..k_n}.
struct NdTaylorCoeffs {
  int dim = 1;
  std::map<std::vector<int>, cplx> terms;
};

void validate(const NdTaylorCoeffs& f);
// Squared wave numbers sum_j k_j^2 that the n-D solution needs from a kernel table.
std::vector<double> nd_k2_values(const NdTaylorCoeffs& f);

// sum a_k z^k d_k(t), d_k read from the table (t must be one of its times,
// or 0, where the result is f(z) exactly). |z| <= 1.
cplx evaluate_solution(const TaylorCoeffs& f, cplx z, double t, const kernels::KernelTable& table);
cplx evaluate_solution(const TaylorCoeffs& f, const DiskPoint& z, double t, const kernels::KernelTable& table);

// sum a_k z^k (phi(theta)/theta) / (phi(theta) + k^2/2).
cplx resolvent(const BernsteinSpec& spec, const TaylorCoeffs& f, cplx z, double theta);

// sum a_{k} z_1^{k_1} ... z_n^{k_n} d(t; k2 = sum k_j^2).
cplx evaluate_solution_nd(const NdTaylorCoeffs& f, std::span<const cplx> z, double t,
                          const kernels::KernelTable& table);

struct CaputoEstimate {
  double value = 0.0;
  double error_estimate = 0.0;  // |D_h - D_{2h}|, the O(h) discretisation error
};

// Caputo derivative (d/dt) int_0^t (t-s)^{-alpha} (u(s) - u(0)) ds / Gamma(1-alpha):
// product integration of the piecewise-linear interpolant on a uniform grid
// of spacing ~h, then a centred difference in t. Repeats with step 2h and
// throws ConvergenceError when the two differ by more than 10%.
CaputoEstimate caputo_derivative(const std::function<double(double)>& u, double alpha, double t, double h);
double caputo_derivative_numeric(const std::function<double(double)>& u, double alpha, double t, double h);

struct ModeResidual {
  double caputo = 0.0;     // D_t^alpha d_k(t), numerically
  double generator = 0.0;  // -(k^2/2) d_k(t)
  double residual = 0.0;   // |caputo - generator|
  double relative = 0.0;   // residual / |d_k(t)|
  double error_estimate = 0.0;
};

// Mode-wise residual of D_t^alpha u = (1/2) u_phiphi for u = d_k(t) z^k, stable clock.
ModeResidual mode_residual(double alpha, int k, double t, double h);

// |D_t^alpha u - (1/2) d^2u/dphi^2| at (z, t) for the stable clock; the
// angular side is exact per mode, the time side numeric.
double pde_residual(const BernsteinSpec& spec, const TaylorCoeffs& f, cplx z, double t, double h);

// Density of B(E_alpha(t)) on the real line:
//   l(x, t) = t^{-alpha/2} / sqrt(2) M_{alpha/2}(sqrt(2) |x| t^{-alpha/2}),
// normalised to unit mass with Fourier transform E_alpha(-k^2 t^alpha / 2)
// (the Gaussian N(0, t) at alpha = 1).
double fundamental_density_stable(double alpha, double x, double t);

// CSV with header `r,phi,t,re_u,im_u`.
void write_field_csv_header(std::ostream& os);
void write_field_csv_row(std::ostream& os, double r, double phi, double t, cplx u);

}  // namespace fracdisk::solver
