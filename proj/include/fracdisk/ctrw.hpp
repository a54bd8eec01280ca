#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/rng.hpp"
#include "fracdisk/wrapped.hpp"

namespace fracdisk::ctrw {

enum class JumpMode {
  ExactStable,  // waiting times are clock increments over spans of 1/c
  Pareto,       // P(J > x) = (x / x0)^{-alpha}, x0 = (c Gamma(1 - alpha))^{-1/alpha}
};

enum class YMode {
  Rademacher,  // +-c^{-1/2}
  Gaussian,    // N(0, 1/c)
};

std::string jump_mode_name(JumpMode m);
JumpMode parse_jump_mode(const std::string& name);
std::string y_mode_name(YMode m);
YMode parse_y_mode(const std::string& name);

struct CtrwConfig {
  double scale_c = 1.0;
  double alpha = 0.5;
  double mu = 0.0;
  JumpMode jump_mode = JumpMode::ExactStable;
  YMode y_mode = YMode::Rademacher;
};

// Throws DomainError unless c >= 1, alpha in (0, 1), mu >= 0, and mu = 0 in Pareto mode.
void validate(const CtrwConfig& config);

// The limiting clock: stable(alpha) or tempered(alpha, mu).
BernsteinSpec limit_spec(const CtrwConfig& config);

// Degenerate test hooks.
struct CtrwHooks {
  bool unit_waiting = false;  // J == 1
  bool zero_jumps = false;    // Y == 0
};

// Renewals above this count abort the run.
inline constexpr std::uint64_t kMaxRenewals = 100'000'000;

struct CtrwSample {
  std::uint64_t count = 0;  // N_t = max{n : J_1 + ... + J_n <= t}
  wrapped::Angle angle;     // wrap(Y_1 + ... + Y_{N_t})
};

// One walk up to time t. Waiting times come from the Jumps channel and the
// jumps from the Auxiliary channel; the sum of N i.i.d. jumps is drawn in one
// step from its exact law (a shifted binomial or a normal). Throws
// CoverageError when N_t exceeds kMaxRenewals.
CtrwSample simulate_ctrw_counted(const CtrwConfig& config, double t, const RngStream& stream,
                                 const CtrwHooks& hooks = {});
wrapped::Angle simulate_ctrw(const CtrwConfig& config, double t, const RngStream& stream,
                             const CtrwHooks& hooks = {});

// n independent walks, walk i on stream.child(i).
std::vector<CtrwSample> simulate_ctrw_many(const CtrwConfig& config, double t, std::size_t n,
                                           const RngStream& stream, const CtrwHooks& hooks = {});

// E[exp(i k (Y_1 + ... + Y_N)) | N = count]: cos(k / sqrt(c))^N or exp(-k^2 N / (2c)).
double conditional_moment(const CtrwConfig& config, int k, std::uint64_t count);

// E[conditional_moment(N_t)] without simulation, for ExactStable waiting times
// and an untempered clock: P(N_t >= n) = P(E(t) >= n/c), with E(t)/t^alpha
// distributed by the M-Wright density M_alpha.
double exact_ctrw_moment(const CtrwConfig& config, int k, double t);

// E exp(i k Theta) for k = 0..k_max, with standard errors.
std::vector<wrapped::CircularMoment> empirical_circular_moments(std::span<const double> angles, int k_max);

struct ConvergenceRow {
  double c = 0.0;
  int k = 0;
  double empirical_re = 0.0;  // mean of conditional_moment over walks
  double empirical_im = 0.0;  // zero by symmetry of the conditional moment
  double se = 0.0;
  double dk = 0.0;
  double abs_error = 0.0;
  wrapped::CircularMoment raw;  // plain mean of exp(i k Theta)
  double exact = 0.0;           // exact_ctrw_moment when available, else NaN
  double exact_error = 0.0;     // |exact - dk|
};

struct ConvergenceReport {
  double t = 0.0;
  std::vector<double> scales;
  std::vector<ConvergenceRow> rows;  // scale-major
  std::vector<double> gamma;         // per k >= 1: fitted exponent of abs_error ~ c^{-gamma}
  double gamma_mean = 0.0;
  std::vector<bool> monotone;        // per k >= 1: non-increasing up to 2 combined SE
  std::vector<double> exact_gamma;   // per k >= 1: same fit on exact_error (empty when unavailable)
  bool all_monotone() const;
};

// Error of the CTRW moments against d_k(t) of the limit clock, for each scale.
ConvergenceReport convergence_report(const CtrwConfig& base, double t, int k_max, std::span<const double> scales,
                                     std::size_t n, const RngStream& stream);

nlohmann::ordered_json to_json(const ConvergenceRow& row);
nlohmann::ordered_json to_json(const ConvergenceReport& report);

}  // namespace fracdisk::ctrw
