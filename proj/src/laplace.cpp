#include "fracdisk/laplace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fracdisk/errors.hpp"

namespace fracdisk::laplace {
namespace {

HighPrecision factorial(int n) {
  HighPrecision r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void check_terms(int n_terms, int max_terms) {
  if (n_terms < 2 || n_terms % 2 != 0) {
    throw DomainError("Gaver-Stehfest: n_terms must be even and >= 2, got " + std::to_string(n_terms));
  }
  if (n_terms > max_terms) {
    throw DomainError("Gaver-Stehfest: n_terms = " + std::to_string(n_terms) + " exceeds the limit of " +
                      std::to_string(max_terms) + " for this precision");
  }
}

}  // namespace

std::vector<HighPrecision> stehfest_weights(int n_terms) {
  check_terms(n_terms, kMaxStehfestTermsHP);
  const int half = n_terms / 2;
  std::vector<HighPrecision> v(n_terms);
  for (int j = 1; j <= n_terms; ++j) {
    HighPrecision s = 0;
    for (int k = (j + 1) / 2; k <= std::min(j, half); ++k) {
      s += pow(HighPrecision(k), half) * factorial(2 * k) /
           (factorial(half - k) * factorial(k) * factorial(k - 1) * factorial(j - k) * factorial(2 * k - j));
    }
    v[j - 1] = ((j + half) % 2 == 0) ? s : HighPrecision(-s);
  }
  return v;
}

double gaver_stehfest(const std::function<double(double)>& transform, double t, int n_terms) {
  check_terms(n_terms, kMaxStehfestTerms64);
  if (!(t > 0.0)) throw DomainError("Gaver-Stehfest: t must be positive");
  const std::vector<HighPrecision> weights = stehfest_weights(n_terms);
  const double step = std::numbers::ln2 / t;
  double sum = 0.0;
  for (int j = 1; j <= n_terms; ++j) sum += static_cast<double>(weights[j - 1]) * transform(j * step);
  return step * sum;
}

HighPrecision gaver_stehfest_hp(const std::function<HighPrecision(const HighPrecision&)>& transform,
                                const HighPrecision& t, int n_terms) {
  if (!(t > 0)) throw DomainError("Gaver-Stehfest: t must be positive");
  const std::vector<HighPrecision> weights = stehfest_weights(n_terms);
  const HighPrecision step = boost::multiprecision::log(HighPrecision(2)) / t;
  HighPrecision sum = 0;
  for (int j = 1; j <= n_terms; ++j) sum += weights[j - 1] * transform(step * j);
  return step * sum;
}

std::vector<double> forward_laplace_weights(std::span<const double> times, double theta) {
  if (!(theta > 0.0)) throw DomainError("forward Laplace: theta must be positive");
  if (times.size() < 2) throw CoverageError("forward Laplace: need at least two grid points");
  if (times.front() != 0.0) throw CoverageError("forward Laplace: grid must start at t = 0");
  const double horizon = times.back();
  if (horizon * theta < 8.0) {
    throw CoverageError("forward Laplace: insufficient horizon T = " + std::to_string(horizon) +
                        " for theta = " + std::to_string(theta) + " (need T >= 8/theta)");
  }
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = times[i];
    const double h = times[i + 1] - a;
    if (!(h > 0.0)) throw CoverageError("forward Laplace: grid must be strictly increasing");
    const double x = theta * h;
    const double ea = std::exp(-theta * a);
    const double whole = -std::expm1(-x);                    // 1 - e^{-x}
    const double ramp = (whole - x * std::exp(-x)) / x;      // (1 - e^{-x}(1 + x)) / x
    w[i] += ea * (whole - ramp) / theta;
    w[i + 1] += ea * ramp / theta;
  }
  w.back() += std::exp(-theta * horizon) / theta;
  return w;
}

LaplaceEstimate forward_laplace(std::span<const double> times, std::span<const double> values, double theta) {
  if (times.size() != values.size()) throw CoverageError("forward Laplace: times/values size mismatch");
  const std::vector<double> w = forward_laplace_weights(times, theta);
  LaplaceEstimate out;
  for (std::size_t i = 0; i < w.size(); ++i) out.value += w[i] * values[i];
  out.tail = values.back() * std::exp(-theta * times.back()) / theta;
  out.tail_bound = std::fabs(out.tail);
  return out;
}

LaplaceEstimate forward_double_laplace(std::span<const double> t1, std::span<const double> t2,
                                       std::span<const double> surface, double theta1, double theta2) {
  if (surface.size() != t1.size() * t2.size()) {
    throw CoverageError("forward double Laplace: surface size does not match the grids");
  }
  const std::vector<double> w1 = forward_laplace_weights(t1, theta1);
  const std::vector<double> w2 = forward_laplace_weights(t2, theta2);
  const double tail1 = std::exp(-theta1 * t1.back()) / theta1;
  const double tail2 = std::exp(-theta2 * t2.back()) / theta2;
  LaplaceEstimate out;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < t2.size(); ++j) row += w2[j] * surface[i * t2.size() + j];
    out.value += w1[i] * row;
  }
  // Part of the value coming from the constant extension beyond the box.
  std::vector<double> inner1 = w1;
  std::vector<double> inner2 = w2;
  inner1.back() -= tail1;
  inner2.back() -= tail2;
  double inner = 0.0;
  double boundary_max = 0.0;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    for (std::size_t j = 0; j < t2.size(); ++j) {
      const double f = surface[i * t2.size() + j];
      inner += inner1[i] * inner2[j] * f;
      if (i + 1 == t1.size() || j + 1 == t2.size()) boundary_max = std::max(boundary_max, std::fabs(f));
    }
  }
  out.tail = out.value - inner;
  out.tail_bound = boundary_max * (tail1 / theta2 + tail2 / theta1);
  return out;
}

}  // namespace fracdisk::laplace
