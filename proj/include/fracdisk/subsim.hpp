#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/rng.hpp"

namespace fracdisk::subsim {

inline constexpr double kDefaultStepDt = 1e-3;
// Smallest admissible acceptance probability of the tempered rejection step.
inline constexpr double kMinAcceptance = 0.1;

// Discretised trajectory of the clock H_g(s) + b s on the grid s_j = j * step_dt.
struct SubordinatorPath {
  double step_dt = kDefaultStepDt;
  std::vector<double> values;  // values[0] = 0, strictly increasing
  double drift_b = 0.0;
};

// One-sided alpha-stable increment with E exp(-theta X) = exp(-dt theta^alpha),
// via the Kanter / Chambers-Mallows-Stuck representation. alpha = 1 gives the
// degenerate increment X = dt.
double sample_stable_increment(double alpha, double dt, Rng& rng);

struct TemperedDraw {
  double value = 0.0;
  std::size_t attempts = 0;  // stable proposals consumed, >= 1
};

// Tempered increment with E exp(-theta X) = exp(-dt ((theta + mu)^alpha - mu^alpha)):
// stable proposals accepted with probability exp(-mu X). mu = 0 draws exactly
// what sample_stable_increment draws. Throws DomainError when the acceptance
// rate exp(-dt mu^alpha) falls below kMinAcceptance.
double sample_tempered_increment(double alpha, double mu, double dt, Rng& rng);
TemperedDraw sample_tempered_increment_counted(double alpha, double mu, double dt, Rng& rng);

// Test hooks for path construction.
struct PathHooks {
  bool suppress_jumps = false;  // keep only the drift b s
};

// Increment of H_g over a step of length dt for the family in `spec` (drift
// excluded). Tempered steps whose acceptance rate would be too low are split
// into 2^m equal sub-steps.
double sample_family_increment(const BernsteinSpec& spec, double dt, Rng& rng);

// Path of H_g(s) + b s on s_j = j * step_dt, extended until it exceeds `horizon`.
// Draws from the Subordinator channel of `stream`.
SubordinatorPath sample_subordinator_path(const BernsteinSpec& spec, double horizon, double step_dt,
                                          const RngStream& stream, const PathHooks& hooks = {});

// First-passage time step_dt * min{j : values[j] > t}. Overestimates E_g(t) by
// at most step_dt. Throws CoverageError when the path ends at or below t.
// t = 0 gives 0 exactly.
double inverse_at(const SubordinatorPath& path, double t);

// E_g(t_i) for ascending t_i, all read off one path, so the joint law across
// times is preserved. Equivalent to inverse_at on the path that
// sample_subordinator_path builds from the same stream. The classical clock
// (alpha = 1) is handled exactly: E(t) = t / (1 + b).
std::vector<double> sample_inverse(const BernsteinSpec& spec, std::span<const double> times, double step_dt,
                                   const RngStream& stream);

// B(E_g(t_i)), with B driven by the Brownian channel of `stream`.
std::vector<double> sample_timechanged_bm(const BernsteinSpec& spec, std::span<const double> times,
                                          double step_dt, const RngStream& stream);

// sample_inverse for n_paths independent paths (path i uses stream.child(i)),
// indexed [time][path]. Independent of the worker count.
std::vector<std::vector<double>> sample_inverse_paths(const BernsteinSpec& spec, std::span<const double> times,
                                                      std::size_t n_paths, double step_dt, const RngStream& stream);

// Brownian values over a nondecreasing sequence of clock readings.
std::vector<double> brownian_at(std::span<const double> clock, const RngStream& stream);

// CSV dumps with headers `s,H` and `t,E`.
void write_path_csv(std::ostream& os, const SubordinatorPath& path);
void write_inverse_csv(std::ostream& os, std::span<const double> times, std::span<const double> inverse);

}  // namespace fracdisk::subsim
