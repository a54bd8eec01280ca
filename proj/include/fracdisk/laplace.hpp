#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <functional>
#include <span>
#include <vector>

namespace fracdisk::laplace {

// 100 significant decimal digits; enough headroom for the Stehfest weights up
// to n_terms = 80 (|V_j| ~ 1e50).
using HighPrecision = boost::multiprecision::cpp_bin_float_100;

inline constexpr int kDefaultStehfestTerms = 14;
inline constexpr int kMaxStehfestTerms64 = 18;
inline constexpr int kDefaultStehfestTermsHP = 28;
inline constexpr int kMaxStehfestTermsHP = 80;

// Gaver-Stehfest inversion in double precision:
//   f(t) ~ ln2/t * sum_{j=1}^{n} V_j F(j ln2 / t).
// n_terms must be even and <= 18; beyond that the alternating weights
// (~1e11 at n = 18) swamp 64-bit arithmetic. Expect 6-7 correct digits on
// smooth completely monotone originals at the default n = 14.
double gaver_stehfest(const std::function<double(double)>& transform, double t,
                      int n_terms = kDefaultStehfestTerms);

// Same scheme carried out in 100-digit arithmetic; the transform must be
// evaluated in that precision too. With n_terms = 28 the truncation error on
// Mittag-Leffler type originals is ~1e-8 relative; fast-decaying originals
// need more terms.
HighPrecision gaver_stehfest_hp(const std::function<HighPrecision(const HighPrecision&)>& transform,
                                const HighPrecision& t, int n_terms = kDefaultStehfestTermsHP);

// Stehfest weights V_1..V_n.
std::vector<HighPrecision> stehfest_weights(int n_terms);

struct LaplaceEstimate {
  double value = 0.0;
  // Contribution assigned to [T, inf) by holding f at its last grid value.
  double tail = 0.0;
  // |tail|: the tail term is exact for constant f and otherwise off by at most this much
  // when |f| <= |f(T)| beyond the grid.
  double tail_bound = 0.0;
};

// Quadrature weights w_i with sum_i w_i f_i = int_0^T e^{-theta t} L(t) dt + f_N e^{-theta T}/theta,
// where L is the piecewise-linear interpolant of (t_i, f_i) (exact-exponential
// trapezoid rule). Requires t_0 = 0, strictly increasing t and T >= 8/theta;
// throws CoverageError otherwise.
std::vector<double> forward_laplace_weights(std::span<const double> times, double theta);

LaplaceEstimate forward_laplace(std::span<const double> times, std::span<const double> values, double theta);

// Tensor-product version over a surface f(t1_i, t2_j) stored row-major
// (index i * t2.size() + j), with the same tail treatment in both variables.
LaplaceEstimate forward_double_laplace(std::span<const double> t1, std::span<const double> t2,
                                       std::span<const double> surface, double theta1, double theta2);

}  // namespace fracdisk::laplace
