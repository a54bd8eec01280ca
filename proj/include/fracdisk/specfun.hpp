#pragma once

// Scalar special functions used by the fractional kernels.
//
// All functions are pure and thread-safe. Real arguments only.

namespace fracdisk::specfun {

// 1/Gamma(x), with the convention 1/Gamma(0, -1, -2, ...) = 0.
double rgamma(double x);

// One-parameter Mittag-Leffler function E_alpha(x) = sum x^j / Gamma(alpha j + 1).
//
// alpha in (0, 1]. For x <= 0 the result lies in (0, 1]. Relative accuracy is
// about 1e-12 for |x| <= 50; large negative arguments are evaluated through a
// real-line integral representation instead of the (cancelling) power series.
// Throws DomainError for alpha outside (0, 1] and ConvergenceError when the
// series for large positive x overflows.
double mittag_leffler(double alpha, double x);

// Two-parameter Mittag-Leffler function E_{alpha,beta}(x) = sum x^j / Gamma(alpha j + beta).
// Terms whose Gamma argument is a non-positive integer contribute 0, so
// E_{alpha,0}(0) = 0.
double mittag_leffler2(double alpha, double beta, double x);

// Wright function W_{beta,gamma}(x) = sum x^k / (k! Gamma(beta k + gamma)),
// beta in (-1, 0].
struct WrightValue {
  double value = 0.0;
  // max_k |term_k| / |sum|; large values mean digits were lost to cancellation.
  double cancellation = 1.0;
};

// Largest cancellation ratio accepted by wright().
inline constexpr double kWrightCancellationBudget = 1e8;

// Evaluates the series without judging the result.
WrightValue wright_eval(double beta, double gamma, double x);

// Evaluates the series and throws AccuracyLossError when the cancellation
// ratio exceeds kWrightCancellationBudget.
double wright(double beta, double gamma, double x);

// Largest y such that wright(beta, gamma, x) stays within the cancellation
// budget for every x in [-y, 0] (scanned on a 1/8 grid). The positive axis
// has no cancellation when beta = 0 and is only limited by overflow.
double wright_safe_limit(double beta, double gamma);

// M-Wright function M_nu(y) = W_{-nu,1-nu}(-y), nu in (0, 1), y >= 0.
// Uses the series while its cancellation ratio stays within budget and
// otherwise the positive integral
//   M_nu(y) = y^{nu/(1-nu)} / (pi (1-nu)) int_0^pi A(p) exp(-y^{1/(1-nu)} A(p)) dp,
//   A(p) = sin(nu p)^{nu/(1-nu)} sin((1-nu) p) / sin(p)^{1/(1-nu)},
// which follows from M_nu being the density of S^{-nu} for a one-sided
// nu-stable S with E exp(-s S) = exp(-s^nu).
double mainardi_m(double nu, double y);
// The integral route alone (for cross-checks).
double mainardi_m_integral(double nu, double y);

// Upper incomplete gamma Gamma(rho, x) = int_x^inf e^{-w} w^{rho-1} dw, x > 0.
// Negative non-integer rho is reached by the recurrence
// Gamma(rho, x) = (Gamma(rho + 1, x) - x^rho e^{-x}) / rho.
// Non-positive integer rho is rejected.
double upper_incomplete_gamma(double rho, double x);

// Non-regularised incomplete beta B(a, b; x) = int_0^x z^{a-1} (1-z)^{b-1} dz.
double incomplete_beta(double a, double b, double x);

}  // namespace fracdisk::specfun
