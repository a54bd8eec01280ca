#include "fracdisk/bernstein.hpp"

#include <cmath>
#include <sstream>

#include "fracdisk/errors.hpp"
#include "fracdisk/specfun.hpp"

namespace fracdisk {

BernsteinSpec BernsteinSpec::stable(double alpha, double drift_b) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("stable family: alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!(drift_b >= 0.0) || !std::isfinite(drift_b)) throw DomainError("drift_b must be finite and >= 0");
  return BernsteinSpec(Family::Stable, alpha, 0.0, drift_b);
}

BernsteinSpec BernsteinSpec::tempered(double alpha, double mu, double drift_b) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("tempered family: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("tempered family: mu must be finite and >= 0");
  if (!(drift_b >= 0.0) || !std::isfinite(drift_b)) throw DomainError("drift_b must be finite and >= 0");
  return BernsteinSpec(Family::TemperedStable, alpha, mu, drift_b);
}

std::string BernsteinSpec::describe() const {
  std::ostringstream os;
  os << (family_ == Family::Stable ? "Stable(" : "TemperedStable(") << alpha_;
  if (family_ == Family::TemperedStable) os << ", mu=" << mu_;
  if (drift_b_ > 0.0) os << ", b=" << drift_b_;
  os << ")";
  return os.str();
}

double g_eval(const BernsteinSpec& spec, double theta) {
  if (!(theta >= 0.0)) throw DomainError("g_eval: theta must be >= 0");
  return g_eval_t(spec, theta);
}

double laplace_exponent(const BernsteinSpec& spec, double theta) {
  if (!(theta >= 0.0)) throw DomainError("laplace_exponent: theta must be >= 0");
  return laplace_exponent_t(spec, theta);
}

double tail_levy(const BernsteinSpec& spec, double s) {
  if (!(s > 0.0)) throw DomainError("tail_levy: s must be positive");
  const double a = spec.alpha();
  if (spec.is_classical()) return 0.0;  // no jumps
  if (spec.mu() == 0.0) return std::pow(s, -a) / std::tgamma(1.0 - a);
  const double mu = spec.mu();
  return a * std::pow(mu, a) * specfun::upper_incomplete_gamma(-a, mu * s) / std::tgamma(1.0 - a);
}

double dk_laplace(const BernsteinSpec& spec, int k, double theta) {
  if (k < 0) throw DomainError("dk_laplace: k must be >= 0");
  return dk_laplace_k2(spec, static_cast<double>(k) * k, theta);
}

double dk_laplace_k2(const BernsteinSpec& spec, double k2, double theta) {
  if (!(theta > 0.0)) throw DomainError("dk_laplace: theta must be positive");
  if (!(k2 >= 0.0)) throw DomainError("dk_laplace: k^2 must be >= 0");
  return dk_laplace_t(spec, k2, theta);
}

double exp_functional_laplace(const BernsteinSpec& spec, double eta, double theta) {
  if (!(theta > 0.0)) throw DomainError("exp_functional_laplace: theta must be positive");
  if (!(eta >= 0.0)) throw DomainError("exp_functional_laplace: eta must be >= 0");
  if (eta == 0.0) return 1.0 / theta;
  const double phi = laplace_exponent(spec, theta);
  return phi / (theta * (eta + phi));
}

nlohmann::ordered_json to_json(const BernsteinSpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = spec.family() == Family::Stable ? "stable" : "tempered";
  j["alpha"] = spec.alpha();
  j["mu"] = spec.mu();
  j["drift_b"] = spec.drift_b();
  return j;
}

BernsteinSpec bernstein_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("spec: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "family" && key != "alpha" && key != "mu" && key != "drift_b") {
      throw ConfigError("spec: unknown field '" + key + "'");
    }
    if (key != "family" && !value.is_number()) throw ConfigError("spec: field '" + key + "' must be a number");
  }
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("spec: missing string field 'family'");
  if (!j.contains("alpha")) throw ConfigError("spec: missing field 'alpha'");
  const std::string family = j["family"].get<std::string>();
  const double alpha = j["alpha"].get<double>();
  const double mu = j.value("mu", 0.0);
  const double b = j.value("drift_b", 0.0);
  try {
    if (family == "stable") {
      if (mu != 0.0) throw ConfigError("spec: 'mu' must be 0 for the stable family");
      return BernsteinSpec::stable(alpha, b);
    }
    if (family == "tempered") return BernsteinSpec::tempered(alpha, mu, b);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("spec: ") + e.what());
  }
  throw ConfigError("spec: unknown family '" + family + "'");
}

}  // namespace fracdisk
