#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/rng.hpp"

namespace fracdisk::moments {

using cplx = std::complex<double>;

// Analytic value against a Monte Carlo estimate, judged at k_se standard errors
// plus a fixed allowance (time-discretisation bias).
struct MomentReport {
  std::string quantity;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  double analytic = 0.0;
  double mc = 0.0;
  double se = 0.0;
  bool pass = false;

  // Sets pass = |analytic - mc| <= k_se * se + allowance.
  void adjudicate(double k_se = 3.0, double allowance = 0.0);
};

nlohmann::ordered_json to_json(const MomentReport& r);

// E[(B_g(t))^r] = E exp(-(r^2/2) E_g(t)) = d_r(t), read from the table (1 at t = 0).
double circular_moment(const kernels::KernelTable& table, int r, double t);

// 2 g(theta) / (theta (r + 2 g(theta))), the transform with exponent r/2 rather
// than r^2/2. Kept for the convention diagnostic.
double moment_laplace_paper(const BernsteinSpec& spec, double r, double theta);

// Double Laplace transform of V(t1, t2) = E exp(-eta1 E(t1) - eta2 E(t2)).
double joint_exp_laplace(const BernsteinSpec& spec, double eta1, double eta2, double theta1, double theta2);

// Closed form that coincides with joint_exp_laplace(3/2, 1/2, theta1, theta2).
double covariance_laplace(const BernsteinSpec& spec, double theta1, double theta2);

struct SymmetryScan {
  double max_relative_asymmetry = 0.0;  // max |C(a,b) - C(b,a)| / |C(a,b)|
  double worst_theta1 = 0.0;
  double worst_theta2 = 0.0;
};

// |covariance_laplace(a, b) - covariance_laplace(b, a)| over a log grid of [lo, hi]^2.
SymmetryScan covariance_symmetry_scan(const BernsteinSpec& spec, double lo, double hi, int points);

// MC estimate of E[B(t) conj(B(s))] = E cos(B(E(t)) - B(E(s))), s <= t, with both
// clock readings taken from one path. Exactly 1 per path when s = t.
MomentReport mixed_moment_mc(const BernsteinSpec& spec, double s, double t, std::size_t n_paths, double step_dt,
                             const RngStream& stream);

// Which argument order to use for the incomplete beta factor of the series.
enum class BetaOrder {
  Derived,  // B(alpha, alpha j + 1; S/T) = int_0^{S/T} y^{alpha-1} (1-y)^{alpha j} dy
  Printed,  // B(alpha j + 1, alpha; S/T), the order found in print
};

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the terms beyond the last one summed
  int terms = 0;
};

inline constexpr int kDefaultSeriesTerms = 400;

// Stable-clock mixed moment with T = max(s, t), S = min(s, t):
//   E_alpha(-T^alpha/2) + T^alpha/(2 Gamma(alpha)) sum_j (-T^alpha/2)^j / Gamma(alpha j + 1) B_j.
// Stops once the remaining terms are below 1e-17 in total; throws ConvergenceError
// when j_max terms do not get there.
SeriesValue mixed_moment_stable_series(double alpha, double s, double t, int j_max = kDefaultSeriesTerms,
                                       BetaOrder order = BetaOrder::Derived);
double mixed_moment_stable(double alpha, double s, double t, int j_max = kDefaultSeriesTerms);

// E_alpha(-T^alpha/2) + (1/2) int_0^S E_alpha(-(T - tau)^alpha / 2) tau^{alpha-1} / Gamma(alpha) dtau
// by tanh-sinh quadrature after tau = u^{1/alpha}. Stable clock only (alpha = 1 allowed).
double mixed_moment_integral(const BernsteinSpec& spec, double s, double t, double quad_tol = 1e-12);

using Matrix = std::vector<std::vector<cplx>>;

// q_ij = z_i z_j (D2 - D1^2) for i != j and z_i^2 (1 - D1^2) on the diagonal,
// D1 = E exp(-E(t)/2) = d(k2 = 1), D2 = E exp(-2 E(t)) = d(k2 = 4).
Matrix nd_covariance(const kernels::KernelTable& table, std::span<const cplx> z, double t);

// E[X_i conj(X_j)] - E[X_i] E[conj(X_j)] for X_j = z_j exp(-i B_j(E(t))) with
// independent B_j: z_i conj(z_j) (D_{1,1} - D1^2) off the diagonal, D_{1,1} = d(k2 = 2),
// and |z_i|^2 (1 - D1^2) on it.
Matrix nd_covariance_independent(const kernels::KernelTable& table, std::span<const cplx> z, double t);

// How the coordinate Brownian motions are coupled in the simulation.
enum class Coupling {
  Independent,  // B_1, ..., B_n independent
  Shared,       // B_1 = ... = B_n
};

// Product convention of the estimator.
enum class Product {
  Conjugated,     // E[X_i conj(X_j)] - E[X_i] E[conj(X_j)]
  OffDiagPlain,   // E[X_i X_j] - E[X_i] E[X_j] for i != j, conjugated on the diagonal
};

struct MatrixEstimate {
  Matrix mean;
  std::vector<std::vector<double>> se_re;
  std::vector<std::vector<double>> se_im;
};

// Monte Carlo covariance of (X_1, ..., X_n); standard errors by the delta method.
MatrixEstimate nd_covariance_mc(const BernsteinSpec& spec, std::span<const cplx> z, double t, std::size_t n_paths,
                                double step_dt, const RngStream& stream, Coupling coupling, Product product);

// Row-major MC surface over grid x grid.
struct Surface {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> se;
};

// E exp(-eta1 E(t1) - eta2 E(t2)), conditional on nothing but the clock path.
Surface exp_functional_surface(const BernsteinSpec& spec, double eta1, double eta2, std::span<const double> grid,
                               std::size_t n_paths, double step_dt, const RngStream& stream);

// E[B(t1) B(t2)] = E exp(-(3/2) E(min) - (1/2) E(max)), symmetric in (t1, t2).
Surface product_moment_surface(const BernsteinSpec& spec, std::span<const double> grid, std::size_t n_paths,
                               double step_dt, const RngStream& stream);

// One record of the r versus r^2 comparison at a single (r, t).
struct ConventionRow {
  int r = 0;
  double t = 0.0;
  double inverted_r2 = 0.0;  // Gaver-Stehfest inversion at eta = r^2 / 2
  double inverted_r = 0.0;   // same at eta = r / 2
  double mc = 0.0;           // mean of cos(r B(E(t)))
  double se = 0.0;
  bool r2_pass = false;
  bool r_pass = false;
};

std::vector<ConventionRow> convention_adjudication(const BernsteinSpec& spec, std::span<const int> r_list, double t,
                                                   std::size_t n_paths, double step_dt, const RngStream& stream);

nlohmann::ordered_json to_json(const ConventionRow& row);

}  // namespace fracdisk::moments
