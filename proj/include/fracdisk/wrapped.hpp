#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/rng.hpp"

namespace fracdisk::wrapped {

double wrap_value(double x);

// A point of the circle, always stored in [0, 2 pi).
class Angle {
 public:
  Angle() = default;
  explicit Angle(double x) : value_(wrap_value(x)) {}
  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

inline Angle wrap(double x) { return Angle(x); }

struct WrappedNormalParams {
  double mean = 0.0;
  double variance = 1.0;  // > 0
};

struct BoundedValue {
  double value = 0.0;
  double truncation_bound = 0.0;  // bound on the omitted part of the series
};

// sum_{|j| <= k_terms} exp(-(phi - mean + 2 pi j)^2 / (2 sigma^2)) / (sqrt(2 pi) sigma),
// with phi - mean first reduced to (-pi, pi].
BoundedValue wrapped_normal_pdf_bounded(const WrappedNormalParams& params, Angle phi, int k_terms);
double wrapped_normal_pdf(const WrappedNormalParams& params, Angle phi, int k_terms = 20);

inline constexpr double kFourierTailTolerance = 1e-12;
inline constexpr int kMaxFourierOrder = 512;

// Smallest K with d_K(t) < kFourierTailTolerance, capped at kMaxFourierOrder.
int fourier_order(const BernsteinSpec& spec, double t);

// Kernel table with enough rows for wrapped_density at every requested time.
kernels::KernelTable density_table(const BernsteinSpec& spec, std::span<const double> times);

struct DensityValue {
  double value = 0.0;
  double truncation_bound = 0.0;
  int order = 0;          // K, number of Fourier modes used
  bool clamped = false;   // negative truncated sum was replaced by 0
  double defect = 0.0;    // size of the clamped negative part
};

// (1/(2 pi)) (1 + 2 sum_{k=1}^{K} d_k(t) cos(k phi)), with K from the table.
// The omitted tail is estimated as K d_K(t) / pi (d_k decays at least like
// k^{-2} for the supported clocks). Throws CoverageError when the table lacks
// t or ends before d_k drops below kFourierTailTolerance with fewer than
// kMaxFourierOrder modes.
DensityValue wrapped_density(const kernels::KernelTable& table, Angle phi, double t);

// Probability mass of the density on `bins` equal arcs of [0, 2 pi), integrated
// term by term.
std::vector<double> wrapped_bin_probabilities(const kernels::KernelTable& table, double t, int bins);

// wrap(B(E_g(t_i))) along one path.
std::vector<Angle> sample_wrapped(const BernsteinSpec& spec, std::span<const double> times, double step_dt,
                                  const RngStream& stream);

// n_paths independent paths; path i uses stream.child(i). Result is indexed
// [time][path] and does not depend on the worker count.
std::vector<std::vector<double>> sample_wrapped_paths(const BernsteinSpec& spec, std::span<const double> times,
                                                      std::size_t n_paths, double step_dt, const RngStream& stream);

struct CircularMoment {
  std::complex<double> value;
  double se_re = 0.0;
  double se_im = 0.0;
};

// Empirical mean of exp(i k Theta) with standard errors; k = 0 gives exactly 1.
CircularMoment circular_fourier(std::span<const double> angles, int k);

struct TestResult {
  double statistic = 0.0;  // Kuiper: lambda; chi-square: X^2
  double critical = 0.0;   // 1% critical value of the same statistic
  double p_value = 1.0;
  bool pass() const { return statistic < critical; }
};

// Two-sample Kuiper test on the circle. statistic is the scaled lambda
// (sqrt(Ne) + 0.155 + 0.24/sqrt(Ne)) V with V = D+ + D-; p-value from the
// asymptotic Kuiper distribution.
TestResult kuiper_two_sample(std::span<const double> a, std::span<const double> b);
double kuiper_tail(double lambda);

// Pearson chi-square goodness of fit of angles against bin probabilities
// (bins.size() equal arcs); dof = bins - 1.
TestResult chi_square_gof(std::span<const double> angles, std::span<const double> probabilities);

void write_density_csv(std::ostream& os, std::span<const double> phi, std::span<const double> mu);
void write_samples_csv(std::ostream& os, std::span<const double> times, std::span<const double> theta);

}  // namespace fracdisk::wrapped
