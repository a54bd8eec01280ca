#include "fracdisk/subsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracdisk/csv.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/mc.hpp"

namespace fracdisk::subsim {
namespace {

constexpr std::size_t kMaxPathSteps = 2'000'000'000;

void check_times(std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw DomainError("times must be finite and >= 0");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("times must be ascending");
  }
}

void check_step(double step_dt) {
  if (!(step_dt > 0.0) || !std::isfinite(step_dt)) throw DomainError("step_dt must be positive");
}

}  // namespace

double sample_stable_increment(double alpha, double dt, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("stable increment: alpha must lie in (0, 1]");
  if (!(dt > 0.0)) throw DomainError("stable increment: dt must be positive");
  if (alpha == 1.0) return dt;
  const double u = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  const double r = (1.0 - alpha) / alpha;
  const double log_x = std::log(dt) / alpha + std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
                       r * (std::log(std::sin((1.0 - alpha) * u)) - std::log(w));
  return std::exp(log_x);
}

TemperedDraw sample_tempered_increment_counted(double alpha, double mu, double dt, Rng& rng) {
  if (!(mu >= 0.0)) throw DomainError("tempered increment: mu must be >= 0");
  if (mu == 0.0) return {sample_stable_increment(alpha, dt, rng), 1};
  const double acceptance = std::exp(-dt * std::pow(mu, alpha));
  if (acceptance < kMinAcceptance) {
    throw DomainError("tempered increment: acceptance rate " + std::to_string(acceptance) +
                      " is below 0.1; use dt <= " + std::to_string(std::log(10.0) / std::pow(mu, alpha)));
  }
  TemperedDraw draw;
  for (;;) {
    const double x = sample_stable_increment(alpha, dt, rng);
    ++draw.attempts;
    if (rng.uniform() < std::exp(-mu * x)) {
      draw.value = x;
      return draw;
    }
  }
}

double sample_tempered_increment(double alpha, double mu, double dt, Rng& rng) {
  return sample_tempered_increment_counted(alpha, mu, dt, rng).value;
}

double sample_family_increment(const BernsteinSpec& spec, double dt, Rng& rng) {
  if (spec.behaves_stable()) return sample_stable_increment(spec.alpha(), dt, rng);
  const double rate = dt * std::pow(spec.mu(), spec.alpha());
  const double limit = std::log(1.0 / kMinAcceptance);
  if (rate <= limit) return sample_tempered_increment(spec.alpha(), spec.mu(), dt, rng);
  const int halvings = static_cast<int>(std::ceil(std::log2(rate / limit)));
  const std::size_t pieces = std::size_t{1} << halvings;
  const double sub_dt = dt / static_cast<double>(pieces);
  double sum = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) sum += sample_tempered_increment(spec.alpha(), spec.mu(), sub_dt, rng);
  return sum;
}

SubordinatorPath sample_subordinator_path(const BernsteinSpec& spec, double horizon, double step_dt,
                                          const RngStream& stream, const PathHooks& hooks) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("path horizon must be positive");
  check_step(step_dt);
  if (hooks.suppress_jumps && spec.drift_b() == 0.0) {
    throw DomainError("path with suppressed jumps and zero drift never reaches the horizon");
  }
  Rng rng(stream, Channel::Subordinator);
  const double drift_step = spec.drift_b() * step_dt;
  SubordinatorPath path{step_dt, {0.0}, spec.drift_b()};
  double h = 0.0;
  while (!(h > horizon)) {
    if (path.values.size() > kMaxPathSteps) throw CoverageError("path: step limit reached before the horizon");
    const double jump = hooks.suppress_jumps ? 0.0 : sample_family_increment(spec, step_dt, rng);
    h += jump + drift_step;
    path.values.push_back(h);
  }
  return path;
}

double inverse_at(const SubordinatorPath& path, double t) {
  if (!(t >= 0.0)) throw DomainError("inverse_at: t must be >= 0");
  if (t == 0.0) return 0.0;  // the clock leaves 0 immediately
  const auto it = std::upper_bound(path.values.begin(), path.values.end(), t);
  if (it == path.values.end()) throw CoverageError("inverse_at: t lies beyond the simulated horizon");
  return path.step_dt * static_cast<double>(it - path.values.begin());
}

std::vector<double> sample_inverse(const BernsteinSpec& spec, std::span<const double> times, double step_dt,
                                   const RngStream& stream) {
  check_times(times);
  check_step(step_dt);
  std::vector<double> out(times.size());
  if (spec.is_classical()) {
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = times[i] / (1.0 + spec.drift_b());
    return out;
  }
  Rng rng(stream, Channel::Subordinator);
  const double drift_step = spec.drift_b() * step_dt;
  double h = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == 0.0) continue;  // E(0) = 0
    while (!(h > times[i])) {
      if (j > kMaxPathSteps) throw CoverageError("sample_inverse: step limit reached");
      h += sample_family_increment(spec, step_dt, rng) + drift_step;
      ++j;
    }
    out[i] = step_dt * static_cast<double>(j);
  }
  return out;
}

std::vector<std::vector<double>> sample_inverse_paths(const BernsteinSpec& spec, std::span<const double> times,
                                                      std::size_t n_paths, double step_dt, const RngStream& stream) {
  std::vector<std::vector<double>> out(times.size(), std::vector<double>(n_paths));
  mc::parallel_for(n_paths, [&](std::size_t i) {
    const std::vector<double> e = sample_inverse(spec, times, step_dt, stream.child(i));
    for (std::size_t j = 0; j < e.size(); ++j) out[j][i] = e[j];
  });
  return out;
}

std::vector<double> brownian_at(std::span<const double> clock, const RngStream& stream) {
  Rng rng(stream, Channel::Brownian);
  std::vector<double> out(clock.size());
  double x = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < clock.size(); ++i) {
    const double dv = clock[i] - previous;
    if (dv < 0.0) throw DomainError("brownian_at: clock must be nondecreasing");
    x += std::sqrt(dv) * rng.normal();
    previous = clock[i];
    out[i] = x;
  }
  return out;
}

std::vector<double> sample_timechanged_bm(const BernsteinSpec& spec, std::span<const double> times,
                                          double step_dt, const RngStream& stream) {
  const std::vector<double> clock = sample_inverse(spec, times, step_dt, stream);
  return brownian_at(clock, stream);
}

void write_path_csv(std::ostream& os, const SubordinatorPath& path) {
  os << "s,H\n";
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    os << csv::num(path.step_dt * static_cast<double>(j)) << ',' << csv::num(path.values[j]) << '\n';
  }
}

void write_inverse_csv(std::ostream& os, std::span<const double> times, std::span<const double> inverse) {
  if (times.size() != inverse.size()) throw DomainError("write_inverse_csv: size mismatch");
  os << "t,E\n";
  for (std::size_t i = 0; i < times.size(); ++i) os << csv::num(times[i]) << ',' << csv::num(inverse[i]) << '\n';
}

}  // namespace fracdisk::subsim
