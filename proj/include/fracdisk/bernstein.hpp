#pragma once

#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/log1p.hpp>

#include <cmath>
#include <string>

#include <json.hpp>

namespace fracdisk {

enum class Family { Stable, TemperedStable };

// A Bernstein function g, i.e. the Laplace exponent of a driftless
// subordinator, plus the drift coefficient b of the evolution operator.
//
//   Stable(alpha):             g(theta) = theta^alpha
//   TemperedStable(alpha, mu): g(theta) = (theta + mu)^alpha - mu^alpha
//
// The drift is kept separate from g: g_eval() never includes it. Path
// simulation adds b*s to the subordinator, and the Laplace-domain kernels use
// the exponent of that process, g(theta) + b*theta (see laplace_exponent()).
//
// Stable(1) is accepted as the classical limit (E_g(t) = t, d_k(t) =
// exp(-k^2 t / 2)); it is what the "alpha = 1" checks throughout the library
// are built on. Tempered families require alpha strictly inside (0, 1).
class BernsteinSpec {
 public:
  static BernsteinSpec stable(double alpha, double drift_b = 0.0);
  static BernsteinSpec tempered(double alpha, double mu, double drift_b = 0.0);
  static BernsteinSpec classical() { return stable(1.0); }

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  // Tempering parameter; 0 for the stable family.
  double mu() const { return mu_; }
  double drift_b() const { return drift_b_; }

  bool is_classical() const { return family_ == Family::Stable && alpha_ == 1.0; }
  // True when the law of the subordinator is the alpha-stable one, which
  // includes TemperedStable with mu = 0.
  bool behaves_stable() const { return mu_ == 0.0; }

  std::string describe() const;

  friend bool operator==(const BernsteinSpec&, const BernsteinSpec&) = default;

 private:
  BernsteinSpec(Family f, double alpha, double mu, double b) : family_(f), alpha_(alpha), mu_(mu), drift_b_(b) {}
  Family family_;
  double alpha_;
  double mu_;
  double drift_b_;
};

// g(theta) for any real type with pow/exp/log (double or multiprecision).
template <class Real>
Real g_eval_t(const BernsteinSpec& spec, const Real& theta) {
  using std::pow;
  const Real alpha = spec.alpha();
  if (spec.mu() == 0.0) return theta == 0 ? Real(0) : Real(pow(theta, alpha));
  // (theta + mu)^alpha - mu^alpha = mu^alpha * expm1(alpha * log1p(theta / mu)).
  const Real mu = spec.mu();
  return Real(pow(mu, alpha) * boost::math::expm1(Real(alpha * boost::math::log1p(Real(theta / mu)))));
}

// Exponent of the simulated clock H_g(s) + b s: g(theta) + b theta.
template <class Real>
Real laplace_exponent_t(const BernsteinSpec& spec, const Real& theta) {
  return g_eval_t(spec, theta) + Real(spec.drift_b()) * theta;
}

// Laplace transform in t of d_k(t) = E exp(-(k^2/2) E_g(t)), with k^2 given
// as a real number:  (phi(theta)/theta) / (phi(theta) + k2/2).
template <class Real>
Real dk_laplace_t(const BernsteinSpec& spec, double k2, const Real& theta) {
  if (k2 == 0.0) return Real(1) / theta;
  const Real phi = laplace_exponent_t(spec, theta);
  return Real(phi / theta) / Real(phi + Real(k2 / 2.0));
}

double g_eval(const BernsteinSpec& spec, double theta);
double laplace_exponent(const BernsteinSpec& spec, double theta);

// Tail of the Levy measure w(s) = nu((s, inf)); s > 0.
double tail_levy(const BernsteinSpec& spec, double s);

double dk_laplace(const BernsteinSpec& spec, int k, double theta);
double dk_laplace_k2(const BernsteinSpec& spec, double k2, double theta);

// int_0^inf e^{-theta t} E[e^{-eta E_g(t)}] dt = phi(theta) / (theta (eta + phi(theta))).
double exp_functional_laplace(const BernsteinSpec& spec, double eta, double theta);

// {"family":"stable"|"tempered","alpha":...,"mu":...,"drift_b":...}
nlohmann::ordered_json to_json(const BernsteinSpec& spec);
// Throws ConfigError on unknown fields, missing fields, or invalid values.
BernsteinSpec bernstein_from_json(const nlohmann::json& j);

}  // namespace fracdisk
