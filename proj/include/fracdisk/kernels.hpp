#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/laplace.hpp"

// d_k(t) = E exp(-(k^2/2) E_g(t)), the decay factor of Fourier mode k.
// Every route takes the squared wave number as a real k2 >= 0; the integer-k
// overloads are thin wrappers.
namespace fracdisk::kernels {

enum class Method { Auto, ClosedForm, Quadrature, Numeric };

std::string method_name(Method m);
// Accepts "auto", "closed_form", "quadrature", "numeric".
Method parse_method(const std::string& name);

inline constexpr double kDefaultQuadTol = 1e-8;

// Stable family: E_alpha(-k2 t^alpha / 2).
double dk_stable(double alpha, int k, double t);
double dk_stable_k2(double alpha, double k2, double t);

// Tempered family by quadrature (k >= 1; k = 0 or t = 0 give 1):
//   d(t) = Gamma(alpha, mu t)/Gamma(alpha)
//        + c/(alpha Gamma(alpha)) int_0^{t^alpha} Gamma(alpha, mu(t - u^{1/alpha})) e^{-mu u^{1/alpha}} E_{alpha,alpha}(c u) du
// with c = mu^alpha - k2/2. Without the leading boundary term the mu = 0 case
// would give E_alpha(-k2 t^alpha/2) - 1; with it the two families agree.
// Throws ConvergenceError when the quadrature error estimate exceeds quad_tol.
double dk_tempered(double alpha, double mu, int k, double t, double quad_tol = kDefaultQuadTol);
double dk_tempered_k2(double alpha, double mu, double k2, double t, double quad_tol = kDefaultQuadTol);

// Any family (drift included) by 100-digit Gaver-Stehfest inversion of
// (phi/theta)/(phi + k2/2), phi = g + b theta. Starting at inv_terms, the term
// count grows by 8 until two successive estimates agree to 1e-10 relative
// (at most kMaxNumericTerms). If they never do, the last estimate is returned
// when the final gap is below 1e-5 and InversionError is raised otherwise.
inline constexpr int kMaxNumericTerms = 68;
double dk_numeric(const BernsteinSpec& spec, int k, double t, int inv_terms = laplace::kDefaultStehfestTermsHP);
double dk_numeric_k2(const BernsteinSpec& spec, double k2, double t,
                     int inv_terms = laplace::kDefaultStehfestTermsHP);

// Route actually used for `requested` (Auto picks closed form for stable,
// quadrature for tempered and inversion whenever drift_b > 0). Throws
// DomainError when an explicitly requested route does not apply.
Method resolve_method(const BernsteinSpec& spec, Method requested);

double dk(const BernsteinSpec& spec, double k2, double t, Method method = Method::Auto);

// n-dimensional kernel: the 1-D kernel at k2 = sum k_j^2.
double dk_nd(const BernsteinSpec& spec, std::span<const int> k_vec, double t, Method method = Method::Auto);

struct KernelTable {
  BernsteinSpec spec = BernsteinSpec::classical();
  std::vector<double> k2;     // ascending squared wave numbers (rows)
  std::vector<double> times;  // ascending (columns)
  std::vector<double> values; // row-major, values[row * times.size() + col]
  std::vector<Method> methods;

  double at(std::size_t row, std::size_t col) const { return values[row * times.size() + col]; }
  Method method_at(std::size_t row, std::size_t col) const { return methods[row * times.size() + col]; }
  // Largest integer k with k^2 present in every row position 0..k (k_max of an integer table).
  int k_max() const;
  // Lookup by exact (k2, t); throws CoverageError when absent.
  double lookup(double k2_value, double t) const;
  double lookup(int k, double t) const { return lookup(static_cast<double>(k) * k, t); }
  bool covers(double k2_value, double t) const;
};

// Table over k = 0..k_max and the given times.
KernelTable build_table(const BernsteinSpec& spec, int k_max, std::span<const double> times,
                        Method method = Method::Auto);
// Table over arbitrary squared wave numbers (sorted and deduplicated).
KernelTable build_table_k2(const BernsteinSpec& spec, std::vector<double> k2, std::span<const double> times,
                           Method method = Method::Auto);

// Throws InvariantError naming (k, t) when an entry leaves (0, 1], d_0 != 1,
// or monotonicity in t or in k fails beyond the tolerance of the route.
void check_invariants(const KernelTable& table);

// CSV with header `k,t,dk,method`; k is written as sqrt(k2).
void write_table_csv(std::ostream& os, const KernelTable& table);

}  // namespace fracdisk::kernels
