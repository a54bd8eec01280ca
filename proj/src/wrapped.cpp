#include "fracdisk/wrapped.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracdisk/csv.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/mc.hpp"
#include "fracdisk/subsim.hpp"

namespace fracdisk::wrapped {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t time_column(const kernels::KernelTable& table, double t) {
  for (std::size_t c = 0; c < table.times.size(); ++c) {
    if (std::fabs(table.times[c] - t) <= 1e-12 * std::max(1.0, t)) return c;
  }
  throw CoverageError("kernel table does not contain t = " + csv::num(t));
}

// Number of leading Fourier modes of the table used at column c, and d at that order.
int usable_order(const kernels::KernelTable& table, std::size_t c) {
  const int k_max = table.k_max();
  if (k_max < 1) throw CoverageError("wrapped density needs a kernel table with k >= 1");
  for (int k = 1; k <= k_max; ++k) {
    if (table.at(static_cast<std::size_t>(k), c) < kFourierTailTolerance) return k;
  }
  if (k_max < kMaxFourierOrder) {
    throw CoverageError("kernel table stops at k = " + std::to_string(k_max) + " while d_k(t) = " +
                        csv::num(table.at(static_cast<std::size_t>(k_max), c)) + " is still above " +
                        csv::num(kFourierTailTolerance));
  }
  return kMaxFourierOrder;
}

}  // namespace

double wrap_value(double x) {
  if (!std::isfinite(x)) throw DomainError("wrap: angle must be finite");
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // -tiny + 2 pi rounds up to 2 pi
  return r;
}

BoundedValue wrapped_normal_pdf_bounded(const WrappedNormalParams& params, Angle phi, int k_terms) {
  if (!(params.variance > 0.0)) throw DomainError("wrapped normal: variance must be positive");
  if (k_terms < 1) throw DomainError("wrapped normal: k_terms must be >= 1");
  double d = std::remainder(phi.value() - params.mean, kTwoPi);  // (-pi, pi]
  const double sigma = std::sqrt(params.variance);
  const double norm = 1.0 / (std::sqrt(kTwoPi) * sigma);
  auto term = [&](double x) { return std::exp(-x * x / (2.0 * params.variance)); };
  // Pair +j with -j so that the result is exactly symmetric in d.
  double sum = term(d);
  for (int j = 1; j <= k_terms; ++j) sum += term(d + kTwoPi * j) + term(d - kTwoPi * j);
  double tail = 0.0;
  for (int j = k_terms + 1;; ++j) {
    const double v = 2.0 * term(kTwoPi * j - std::numbers::pi);
    tail += v;
    if (v <= 1e-18 * tail || v == 0.0 || j > k_terms + 100000) break;
  }
  return {norm * sum, norm * tail};
}

double wrapped_normal_pdf(const WrappedNormalParams& params, Angle phi, int k_terms) {
  return wrapped_normal_pdf_bounded(params, phi, k_terms).value;
}

int fourier_order(const BernsteinSpec& spec, double t) {
  if (!(t > 0.0)) throw DomainError("fourier_order: t must be positive");
  auto small = [&](int k) { return kernels::dk(spec, static_cast<double>(k) * k, t) < kFourierTailTolerance; };
  int hi = 1;
  while (hi < kMaxFourierOrder && !small(hi)) hi = std::min(2 * hi, kMaxFourierOrder);
  if (!small(hi)) return kMaxFourierOrder;
  int lo = hi / 2;  // !small(lo) or lo == 0
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (small(mid) ? hi : lo) = mid;
  }
  return hi;
}

kernels::KernelTable density_table(const BernsteinSpec& spec, std::span<const double> times) {
  int order = 1;
  for (double t : times) order = std::max(order, fourier_order(spec, t));
  return kernels::build_table(spec, order, times);
}

DensityValue wrapped_density(const kernels::KernelTable& table, Angle phi, double t) {
  if (!(t > 0.0)) throw DomainError("wrapped density: t must be positive");
  const std::size_t c = time_column(table, t);
  DensityValue out;
  out.order = usable_order(table, c);
  double sum = 0.0;
  for (int k = out.order; k >= 1; --k) sum += table.at(static_cast<std::size_t>(k), c) * std::cos(k * phi.value());
  const double d_last = table.at(static_cast<std::size_t>(out.order), c);
  out.truncation_bound = out.order * d_last / std::numbers::pi;
  out.value = (1.0 + 2.0 * sum) / kTwoPi;
  if (out.value < 0.0) {
    out.clamped = true;
    out.defect = -out.value;
    out.value = 0.0;
  }
  return out;
}

std::vector<double> wrapped_bin_probabilities(const kernels::KernelTable& table, double t, int bins) {
  if (bins < 1) throw DomainError("wrapped_bin_probabilities: bins must be >= 1");
  if (!(t > 0.0)) throw DomainError("wrapped_bin_probabilities: t must be positive");
  const std::size_t c = time_column(table, t);
  const int order = usable_order(table, c);
  std::vector<double> p(static_cast<std::size_t>(bins));
  const double width = kTwoPi / bins;
  for (int b = 0; b < bins; ++b) {
    const double lo = b * width;
    const double hi = (b + 1) * width;
    double s = 0.0;
    for (int k = order; k >= 1; --k) {
      s += table.at(static_cast<std::size_t>(k), c) * (std::sin(k * hi) - std::sin(k * lo)) / k;
    }
    p[static_cast<std::size_t>(b)] = width / kTwoPi + s / std::numbers::pi;
  }
  return p;
}

std::vector<Angle> sample_wrapped(const BernsteinSpec& spec, std::span<const double> times, double step_dt,
                                  const RngStream& stream) {
  const std::vector<double> x = subsim::sample_timechanged_bm(spec, times, step_dt, stream);
  std::vector<Angle> out;
  out.reserve(x.size());
  for (double v : x) out.emplace_back(v);
  return out;
}

std::vector<std::vector<double>> sample_wrapped_paths(const BernsteinSpec& spec, std::span<const double> times,
                                                      std::size_t n_paths, double step_dt,
                                                      const RngStream& stream) {
  std::vector<std::vector<double>> out(times.size(), std::vector<double>(n_paths));
  mc::parallel_for(n_paths, [&](std::size_t i) {
    const std::vector<Angle> a = sample_wrapped(spec, times, step_dt, stream.child(i));
    for (std::size_t j = 0; j < a.size(); ++j) out[j][i] = a[j].value();
  });
  return out;
}

CircularMoment circular_fourier(std::span<const double> angles, int k) {
  if (angles.empty()) throw DomainError("circular_fourier: empty sample");
  if (k == 0) return {{1.0, 0.0}, 0.0, 0.0};
  std::vector<double> re(angles.size());
  std::vector<double> im(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    re[i] = std::cos(k * angles[i]);
    im[i] = std::sin(k * angles[i]);
  }
  const mc::Estimate er = mc::summarize(re);
  const mc::Estimate ei = mc::summarize(im);
  return {{er.mean, ei.mean}, er.se, ei.se};
}

double kuiper_tail(double lambda) {
  if (lambda < 0.4) return 1.0;
  double q = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double jl2 = static_cast<double>(j) * j * lambda * lambda;
    const double term = (4.0 * jl2 - 1.0) * std::exp(-2.0 * jl2);
    q += term;
    if (std::fabs(term) < 1e-16 * std::fabs(q)) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

TestResult kuiper_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("kuiper_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  for (double& v : x) v = wrap_value(v);
  for (double& v : y) v = wrap_value(v);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d_max = 0.0;
  double d_min = 0.0;
  while (i < x.size() || j < y.size()) {
    const double v = (j == y.size() || (i < x.size() && x[i] <= y[j])) ? x[i] : y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    const double d = static_cast<double>(i) / n1 - static_cast<double>(j) / n2;
    d_max = std::max(d_max, d);
    d_min = std::min(d_min, d);
  }
  const double v = d_max - d_min;
  const double ne = std::sqrt(n1 * n2 / (n1 + n2));
  TestResult r;
  r.statistic = (ne + 0.155 + 0.24 / ne) * v;
  r.p_value = kuiper_tail(r.statistic);
  double lo = 1.0;
  double hi = 4.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kuiper_tail(mid) > 0.01 ? lo : hi) = mid;
  }
  r.critical = 0.5 * (lo + hi);
  return r;
}

TestResult chi_square_gof(std::span<const double> angles, std::span<const double> probabilities) {
  if (angles.empty()) throw DomainError("chi_square_gof: empty sample");
  const std::size_t bins = probabilities.size();
  if (bins < 2) throw DomainError("chi_square_gof: need at least two bins");
  std::vector<double> counts(bins, 0.0);
  for (double a : angles) {
    auto idx = static_cast<std::size_t>(wrap_value(a) / kTwoPi * static_cast<double>(bins));
    counts[std::min(idx, bins - 1)] += 1.0;
  }
  const double n = static_cast<double>(angles.size());
  double x2 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double expected = n * probabilities[b];
    if (!(expected > 0.0)) throw DomainError("chi_square_gof: bin probabilities must be positive");
    x2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins - 1));
  TestResult r;
  r.statistic = x2;
  r.critical = boost::math::quantile(boost::math::complement(dist, 0.01));
  r.p_value = boost::math::cdf(boost::math::complement(dist, x2));
  return r;
}

void write_density_csv(std::ostream& os, std::span<const double> phi, std::span<const double> mu) {
  if (phi.size() != mu.size()) throw DomainError("write_density_csv: size mismatch");
  os << "phi,mu\n";
  for (std::size_t i = 0; i < phi.size(); ++i) os << csv::num(phi[i]) << ',' << csv::num(mu[i]) << '\n';
}

void write_samples_csv(std::ostream& os, std::span<const double> times, std::span<const double> theta) {
  if (times.size() != theta.size()) throw DomainError("write_samples_csv: size mismatch");
  os << "t,theta\n";
  for (std::size_t i = 0; i < times.size(); ++i) os << csv::num(times[i]) << ',' << csv::num(theta[i]) << '\n';
}

}  // namespace fracdisk::wrapped
