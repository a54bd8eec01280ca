#include "fracdisk/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

#include <array>
#include <cmath>
#include <vector>
#include <limits>
#include <numbers>
#include <string>

#include "fracdisk/errors.hpp"

namespace fracdisk::specfun {
namespace {

using ld = long double;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(ld v) {
    const ld t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  ld value() const { return sum_ + comp_; }

 private:
  ld sum_ = 0.0L;
  ld comp_ = 0.0L;
};

bool is_nonpositive_integer(ld y) { return y <= 0.0L && y == std::floor(y); }

ld rgamma_ld(ld y) {
  if (is_nonpositive_integer(y)) return 0.0L;
  if (y > 1500.0L) return std::exp(-std::lgamma(y));
  return 1.0L / std::tgamma(y);
}

// sin(pi y) with exact reduction of y modulo 2.
ld sin_pi_ld(ld y) {
  const ld r = y - 2.0L * std::nearbyint(y / 2.0L);
  return std::sin(std::numbers::pi_v<ld> * r);
}

// log|1/Gamma(y)| and its sign; sign 0 at the poles.
void log_rgamma(ld y, ld& logmag, int& sign) {
  if (is_nonpositive_integer(y)) {
    logmag = -std::numeric_limits<ld>::infinity();
    sign = 0;
    return;
  }
  if (y > 0.0L) {
    logmag = -std::lgamma(y);
    sign = 1;
    return;
  }
  // Reflection: 1/Gamma(y) = sin(pi y) Gamma(1 - y) / pi.
  const ld s = sin_pi_ld(y);
  logmag = std::log(std::fabs(s)) + std::lgamma(1.0L - y) - std::log(std::numbers::pi_v<ld>);
  sign = s > 0.0L ? 1 : -1;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("Mittag-Leffler: alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

// Power series sum x^j / Gamma(alpha j + beta) in extended precision.
double ml_series(double alpha, double beta, double x) {
  constexpr int kMaxTerms = 200000;
  const ld la = alpha;
  const ld lb = beta;
  const ld lx = x;
  const ld log_abs_x = std::log(std::fabs(lx));
  CompensatedSum sum;
  ld max_term = 0.0L;
  for (int j = 0; j < kMaxTerms; ++j) {
    const ld arg = la * j + lb;
    ld term;
    if (arg > 0.0L) {
      term = std::exp(j * log_abs_x - std::lgamma(arg));
    } else {
      term = std::pow(std::fabs(lx), static_cast<ld>(j)) * std::fabs(rgamma_ld(arg));
    }
    if (!std::isfinite(term)) {
      throw ConvergenceError("Mittag-Leffler series overflow at x = " + std::to_string(x),
                             std::numeric_limits<double>::infinity());
    }
    int sign = (x < 0.0 && (j % 2 == 1)) ? -1 : 1;
    if (arg <= 0.0L && rgamma_ld(arg) < 0.0L) sign = -sign;
    sum.add(sign * term);
    max_term = std::max(max_term, term);
    // Past the peak once Gamma grows faster than |x|^j.
    const bool decaying = arg > 1.0L && std::pow(std::fabs(lx), 1.0L / la) < arg;
    if (decaying && term <= 1e-21L * std::fabs(sum.value())) break;
    if (decaying && term == 0.0L) break;
    if (j == kMaxTerms - 1) {
      throw ConvergenceError("Mittag-Leffler series did not converge",
                             static_cast<double>(term / std::fabs(sum.value())));
    }
  }
  const ld value = sum.value();
  if (!std::isfinite(value) || std::fabs(value) > std::numeric_limits<double>::max()) {
    throw ConvergenceError("Mittag-Leffler value exceeds double range at x = " + std::to_string(x),
                           std::numeric_limits<double>::infinity());
  }
  return static_cast<double>(value);
}

// E_{alpha,beta}(-x) for x > 0, 0 < alpha < 1, beta < 1 + alpha, through
//   E_{alpha,beta}(z) = int_0^inf K(chi) dchi,
//   K = chi^{(1-beta)/alpha} exp(-chi^{1/alpha})
//       (chi sin(pi(1-beta)) - z sin(pi(1-beta+alpha))) / (pi alpha (chi^2 - 2 chi z cos(pi alpha) + z^2)),
// valid for |arg z| > alpha pi. The denominator peaks sharply near
// chi = -x cos(pi alpha) when alpha is close to 1, so the range is split there.
double ml_integral(double alpha, double beta, double x) {
  using boost::math::quadrature::gauss_kronrod;
  const double s1 = boost::math::sin_pi(1.0 - beta);
  const double s2 = boost::math::sin_pi(1.0 - beta + alpha);
  const double c = boost::math::cos_pi(alpha);
  const double sa = boost::math::sin_pi(alpha);
  const double power = (1.0 - beta) / alpha;
  const double inv_alpha = 1.0 / alpha;
  const double scale = 1.0 / (std::numbers::pi * alpha);
  // The denominator is (chi - p)^2 + w^2 with p = -x cos(pi alpha), w = x sin(pi alpha).
  // Close to the peak, chi = p + w tan(psi) cancels it; this keeps the narrow
  // peak near alpha = 1 from turning rounding noise into quadrature error.
  const double p = -x * c;
  const double w = std::max(x * sa, 1e-300);
  auto numerator = [&](double chi) {
    return scale * std::pow(chi, power) * std::exp(-std::pow(chi, inv_alpha)) * (chi * s1 + x * s2);
  };
  auto kernel = [&](double chi) {
    if (chi <= 0.0) return 0.0;  // never sampled: Gauss-Kronrod nodes are interior
    const double shifted = chi - p;
    return numerator(chi) / (shifted * shifted + w * w);
  };
  auto kernel_psi = [&](double psi) {
    const double chi = p + w * std::tan(psi);
    return chi <= 0.0 ? 0.0 : numerator(chi) / w;
  };
  auto to_psi = [&](double chi) { return std::atan((chi - p) / w); };
  constexpr double kNear = 8.0;
  const bool narrow = w < 0.05 * p;

  const double upper = std::max(std::pow(60.0, alpha), 1.0);
  // Geometric cuts on both sides of the peak.
  std::vector<double> cuts{0.0, std::max(p, 0.0), std::min(1.0, upper), upper};
  for (double m = w; m < upper; m *= 8.0) {
    cuts.push_back(p - m);
    cuts.push_back(p + m);
  }
  // Cuts that differ from 0 only by rounding would strand the endpoint treatment.
  std::erase_if(cuts, [&](double v) { return v > 0.0 && v < 1e-9 * std::max(1.0, p); });
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  double error_sum = 0.0;
  double prev = 0.0;
  for (double cut : cuts) {
    const double b = std::clamp(cut, 0.0, upper);
    if (b <= prev) continue;
    double err = 0.0;
    if (narrow && std::fabs(prev - p) <= kNear * w && std::fabs(b - p) <= kNear * w) {
      total += gauss_kronrod<double, 31>::integrate(kernel_psi, to_psi(prev), to_psi(b), 12, 1e-13, &err);
    } else if (prev == 0.0 && power != std::floor(power)) {
      // chi^power and chi^(power + 1) at the left end: tanh-sinh handles both.
      boost::math::quadrature::tanh_sinh<double> ts;
      const double v = ts.integrate(kernel, 0.0, b, 1e-13, &err);
      err *= 0.5 * b;  // reported on the rescaled interval [-1, 1]
      total += v;
    } else {
      total += gauss_kronrod<double, 31>::integrate(kernel, prev, b, 12, 1e-13, &err);
    }
    error_sum += err;
    prev = b;
  }
  if (!(error_sum <= 1e-10 * std::fabs(total) + 1e-300)) {
    throw ConvergenceError("Mittag-Leffler integral representation", error_sum / std::fabs(total));
  }
  return total;
}

double ml_alpha_one(double beta, double x) {
  if (beta == 1.0) return std::exp(x);
  if (beta == 0.0) return x * std::exp(x);
  if (beta == 2.0) return std::expm1(x) / x;
  if (x >= 0.0 || x >= -5.0) return ml_series(1.0, beta, x);
  if (beta > 2.0 && beta == std::floor(beta)) {
    // E_{1,n}(x) = (E_{1,n-1}(x) - 1/Gamma(n-1)) / x, stable for x < 0.
    double v = std::expm1(x) / x;
    for (double b = 3.0; b <= beta; b += 1.0) v = (v - static_cast<double>(rgamma_ld(b - 1.0))) / x;
    return v;
  }
  throw DomainError("Mittag-Leffler: alpha = 1 with non-integer beta needs x >= -5");
}

}  // namespace

double rgamma(double x) { return static_cast<double>(rgamma_ld(x)); }

double mittag_leffler(double alpha, double x) { return mittag_leffler2(alpha, 1.0, x); }

double mittag_leffler2(double alpha, double beta, double x) {
  check_alpha(alpha);
  if (!std::isfinite(beta) || !std::isfinite(x)) {
    throw DomainError("Mittag-Leffler: beta and x must be finite");
  }
  if (x == 0.0) return rgamma(beta);
  if (alpha == 1.0) return ml_alpha_one(beta, x);
  if (x > 0.0) return ml_series(alpha, beta, x);

  const double y = -x;
  if (std::pow(y, 1.0 / alpha) <= 3.0) return ml_series(alpha, beta, x);
  if (beta < 1.0 + alpha) return ml_integral(alpha, beta, y);
  // E_{alpha,beta}(x) = (E_{alpha,beta-alpha}(x) - 1/Gamma(beta-alpha)) / x.
  return (mittag_leffler2(alpha, beta - alpha, x) - rgamma(beta - alpha)) / x;
}

WrightValue wright_eval(double beta, double gamma, double x) {
  if (!(beta > -1.0 && beta <= 0.0)) {
    throw DomainError("Wright: beta must lie in (-1, 0], got " + std::to_string(beta));
  }
  if (!std::isfinite(gamma) || !std::isfinite(x)) throw DomainError("Wright: non-finite argument");
  if (x == 0.0) return {rgamma(gamma), 1.0};

  constexpr int kMaxTerms = 20000;
  const ld lb = beta;
  const ld lg = gamma;
  const ld log_abs_x = std::log(std::fabs(static_cast<ld>(x)));
  CompensatedSum sum;
  ld max_log = -std::numeric_limits<ld>::infinity();
  ld max_term = 0.0L;
  for (int k = 0; k < kMaxTerms; ++k) {
    const ld arg = lb * k + lg;
    ld log_rg;
    int sign;
    log_rgamma(arg, log_rg, sign);
    // Envelope without the sine factor, used only for the stopping rule.
    const ld envelope = k * log_abs_x - std::lgamma(static_cast<ld>(k) + 1.0L) +
                        (arg > 0.0L ? -std::lgamma(arg)
                                    : std::lgamma(1.0L - arg) - std::log(std::numbers::pi_v<ld>));
    if (sign != 0) {
      const ld log_term = k * log_abs_x - std::lgamma(static_cast<ld>(k) + 1.0L) + log_rg;
      const ld term = std::exp(log_term);
      if (!std::isfinite(term)) {
        throw ConvergenceError("Wright series overflow", std::numeric_limits<double>::infinity());
      }
      const int s = (x < 0.0 && (k % 2 == 1)) ? -sign : sign;
      sum.add(s * term);
      max_term = std::max(max_term, term);
    }
    max_log = std::max(max_log, envelope);
    if (k > 2 && envelope < max_log - 55.0L) break;
    if (k == kMaxTerms - 1) {
      throw ConvergenceError("Wright series did not converge", static_cast<double>(std::exp(envelope)));
    }
  }
  const ld value = sum.value();
  const double ratio =
      value == 0.0L ? std::numeric_limits<double>::infinity() : static_cast<double>(max_term / std::fabs(value));
  return {static_cast<double>(value), std::max(1.0, ratio)};
}

double wright(double beta, double gamma, double x) {
  const WrightValue w = wright_eval(beta, gamma, x);
  if (w.cancellation > kWrightCancellationBudget) {
    throw AccuracyLossError("Wright series cancellation ratio " + std::to_string(w.cancellation) +
                                " exceeds budget at x = " + std::to_string(x),
                            w.cancellation);
  }
  return w.value;
}

double wright_safe_limit(double beta, double gamma) {
  constexpr double kStep = 0.125;
  double y = 0.0;
  while (y < 500.0) {
    const double next = y + kStep;
    const WrightValue w = wright_eval(beta, gamma, -next);
    if (w.cancellation > kWrightCancellationBudget) break;
    y = next;
  }
  return y;
}

double mainardi_m_integral(double nu, double y) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("M-Wright: nu must lie in (0, 1)");
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("M-Wright integral: y must be positive");
  const double q = 1.0 / (1.0 - nu);
  const double z = std::pow(y, q);
  // a(p) increases from a(0+) = nu^{nu q} (1 - nu); factoring out exp(-z a(0+))
  // keeps the integral of order one even where M itself underflows.
  const double a0 = std::pow(nu, nu * q) * (1.0 - nu);
  const double log_prefactor = nu * q * std::log(y) + std::log(q / std::numbers::pi) - z * a0;
  // a e^{-z (a - a0)} <= a0 + 1 on the whole range, so the integral is below pi (a0 + 1).
  if (log_prefactor + std::log(std::numbers::pi * (a0 + 1.0)) < -750.0) return 0.0;
  auto integrand = [&](double p) {
    const double log_a = nu * q * std::log(std::sin(nu * p)) + std::log(std::sin((1.0 - nu) * p)) -
                         q * std::log(std::sin(p));
    const double a = std::exp(log_a);
    return std::isfinite(a) ? std::exp(log_a - z * (a - a0)) : 0.0;
  };
  double err = 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double integral = ts.integrate(integrand, 0.0, std::numbers::pi, 1e-13, &err);
  err *= 0.5 * std::numbers::pi;  // reported on the rescaled interval [-1, 1]
  if (!(err <= 1e-9 * integral)) throw ConvergenceError("M-Wright integral representation", err / integral);
  return std::exp(log_prefactor + std::log(integral));
}

double mainardi_m(double nu, double y) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("M-Wright: nu must lie in (0, 1)");
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("M-Wright: y must be finite and >= 0");
  if (y == 0.0) return wright_eval(-nu, 1.0 - nu, 0.0).value;
  try {
    const WrightValue w = wright_eval(-nu, 1.0 - nu, -y);
    if (w.cancellation <= kWrightCancellationBudget) return w.value;
  } catch (const ConvergenceError&) {
    // series overflow far out in the tail
  }
  return mainardi_m_integral(nu, y);
}

double upper_incomplete_gamma(double rho, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("upper incomplete gamma: x must be positive, got " + std::to_string(x));
  }
  if (!std::isfinite(rho)) throw DomainError("upper incomplete gamma: rho must be finite");
  if (rho <= 0.0 && rho == std::floor(rho)) {
    throw DomainError("upper incomplete gamma: pole at non-positive integer rho = " + std::to_string(rho));
  }
  if (rho > 0.0) return boost::math::tgamma(rho, x);

  const int steps = static_cast<int>(std::ceil(-rho));
  double r = rho + steps;  // in (0, 1)
  double value = boost::math::tgamma(r, x);
  const double ex = std::exp(-x);
  for (int i = 0; i < steps; ++i) {
    r -= 1.0;
    value = (value - std::pow(x, r) * ex) / r;
  }
  return value;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  return boost::math::beta(a, b, x);
}

}  // namespace fracdisk::specfun
