// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// diagnostic lines. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/ctrw.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/laplace.hpp"
#include "fracdisk/mc.hpp"
#include "fracdisk/moments.hpp"
#include "fracdisk/rng.hpp"
#include "fracdisk/solver.hpp"
#include "fracdisk/specfun.hpp"
#include "fracdisk/subsim.hpp"
#include "fracdisk/wrapped.hpp"

using namespace fracdisk;
using cplx = std::complex<double>;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double kPi = 3.14159265358979323846;

int failures = 0;

void verdict(int id, bool pass, const std::string& summary) {
  std::printf("criterion %d: %s %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void diag(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void diag(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<double> kGridT{0.1, 0.5, 1.0, 2.0, 5.0};

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double alpha : {0.4, 0.6, 0.8}) {
    const BernsteinSpec spec = BernsteinSpec::stable(alpha);
    for (int k = 1; k <= 5; ++k) {
      for (double t : kGridT) {
        const double exact = kernels::dk_stable(alpha, k, t);
        worst = std::max(worst, std::fabs(kernels::dk_numeric(spec, k, t) - exact) / exact);
      }
    }
  }
  const double secs = seconds_since(t0);
  verdict(1, worst <= 1e-6 && secs < 5.0, fmt("max rel gap inversion vs closed form %.3g (<= 1e-6), %.2f s (< 5 s)", worst, secs));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  double collapse = 0.0;
  double vs_inv = 0.0;
  for (double alpha : {0.4, 0.6, 0.8}) {
    for (int k = 1; k <= 5; ++k) {
      for (double t : kGridT) {
        const double exact = kernels::dk_stable(alpha, k, t);
        collapse = std::max(collapse, std::fabs(kernels::dk_tempered(alpha, 0.0, k, t) - exact) / exact);
        for (double mu : {0.5, 2.0}) {
          const double q = kernels::dk_tempered(alpha, mu, k, t);
          const double n = kernels::dk_numeric(BernsteinSpec::tempered(alpha, mu), k, t);
          vs_inv = std::max(vs_inv, std::fabs(q - n) / n);
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  verdict(2, collapse <= 1e-6 && vs_inv <= 1e-5 && secs < 30.0,
          fmt("mu=0 collapse %.3g (<= 1e-6), tempered vs inversion %.3g (<= 1e-5), %.1f s", collapse, vs_inv, secs));
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 100000;
  const double dt = 1e-3;
  const cplx z = std::polar(0.9, 0.7);
  const std::vector<double> times{0.5, 1.0};
  const std::vector<solver::TaylorCoeffs> fs{{{0.0, 1.0}}, {{0.0, 0.0, 1.0}}, {{0.0, 1.0, 1.0}}};
  const char* names[] = {"z", "z^2", "z+z^2"};
  bool pass = true;
  double worst = 0.0;
  for (double alpha : {0.5, 0.8}) {
    const BernsteinSpec spec = BernsteinSpec::stable(alpha);
    const auto theta = wrapped::sample_wrapped_paths(spec, times, n, dt, RngStream{kSeed, 3}.child(alpha * 10));
    const kernels::KernelTable table = kernels::build_table(spec, 2, times);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      for (std::size_t fi = 0; fi < fs.size(); ++fi) {
        std::vector<double> re(n), im(n);
        for (std::size_t p = 0; p < n; ++p) {
          const cplx u = fs[fi](z * std::polar(1.0, -theta[ti][p]));
          re[p] = u.real();
          im[p] = u.imag();
        }
        const mc::Estimate er = mc::summarize(re);
        const mc::Estimate ei = mc::summarize(im);
        const cplx exact = solver::evaluate_solution(fs[fi], z, times[ti], table);
        const double zr = std::fabs(er.mean - exact.real()) / (er.se + 1e-300);
        const double zi = std::fabs(ei.mean - exact.imag()) / (ei.se + 1e-300);
        const bool ok = std::fabs(er.mean - exact.real()) <= 3.0 * er.se + 2.0 * dt &&
                        std::fabs(ei.mean - exact.imag()) <= 3.0 * ei.se + 2.0 * dt;
        worst = std::max({worst, zr, zi});
        if (!ok) {
          pass = false;
          diag("alpha=%.1f t=%.1f f=%s: mc (%.5f, %.5f) vs (%.5f, %.5f)", alpha, times[ti], names[fi], er.mean, ei.mean,
               exact.real(), exact.imag());
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  verdict(3, pass && secs < 120.0, fmt("12 cases within 3 SE + 2 step_dt (largest |gap|/SE %.2f), %.1f s", worst, secs));
}

void criterion4() {
  const BernsteinSpec spec = BernsteinSpec::stable(0.999);
  solver::TaylorCoeffs f;
  for (int k = 0; k <= 10; ++k) f.coeffs.push_back(std::pow(0.5, k));
  std::vector<double> times;
  for (int i = 1; i <= 20; ++i) times.push_back(0.1 * i);
  const kernels::KernelTable table = kernels::build_table(spec, 10, times);
  double worst = 0.0;
  for (int j = 0; j < 20; ++j) {
    const cplx z = std::polar(0.5 + 0.025 * j, 2.0 * kPi * j / 20.0);
    for (double t : times) {
      cplx classical = 0.0;
      for (int k = 0; k <= 10; ++k) classical += f.coeffs[static_cast<std::size_t>(k)] * std::pow(z, k) * std::exp(-0.5 * k * k * t);
      worst = std::max(worst, std::abs(solver::evaluate_solution(f, z, t, table) - classical));
    }
  }
  verdict(4, worst <= 5e-3, fmt("max |u(alpha=0.999) - u(classical)| = %.3g over 20x20 grid (<= 5e-3)", worst));
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 20000;
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  const std::vector<double> one{1.0};
  std::vector<double> a(n), b(n), b2(n);
  const RngStream base{kSeed, 5};
  mc::parallel_for(n, [&](std::size_t i) {
    a[i] = subsim::sample_timechanged_bm(spec, one, 1e-3, base.child(i))[0];
    Rng rng(base.child(n + i), Channel::Auxiliary);
    const double n1 = rng.normal();
    const double n2 = rng.normal();
    b[i] = n1 * std::sqrt(std::fabs(n2));                 // B1(|B2(1)|)
    b2[i] = n1 * std::sqrt(std::fabs(std::sqrt(2.0) * n2));  // B1(|B2(2)|)
  });
  const wrapped::TestResult literal = wrapped::kuiper_two_sample(a, b);
  const wrapped::TestResult rescaled = wrapped::kuiper_two_sample(a, b2);
  const double secs = seconds_since(t0);
  verdict(5, literal.pass() && secs < 60.0,
          fmt("Kuiper wrap(B(E_1/2(1))) vs wrap(B1(|B2(1)|)): lambda %.3f vs 1%% critical %.3f (p = %.2g)",
              literal.statistic, literal.critical, literal.p_value));
  diag("with g(theta) = theta^(1/2) the matching iterated process is B1(|B2(2t)|):");
  diag("Kuiper vs wrap(B1(|B2(2)|)): lambda %.3f, critical %.3f, p = %.3f, %s", rescaled.statistic, rescaled.critical,
       rescaled.p_value, rescaled.pass() ? "pass" : "fail");
  std::vector<double> ca(n), cb(n);
  for (std::size_t i = 0; i < n; ++i) {
    ca[i] = std::cos(a[i]);
    cb[i] = std::cos(b[i]);
  }
  diag("E cos: time-changed %.4f, literal iterated %.4f, d_1(1) = %.4f", mc::summarize(ca).mean, mc::summarize(cb).mean,
       kernels::dk_stable(0.5, 1, 1.0));
}

void criterion6() {
  double worst = 0.0;
  for (double alpha : {0.5, 0.7}) {
    for (int k = 1; k <= 3; ++k) {
      for (double t : {0.5, 1.0, 1.5, 2.0}) {
        worst = std::max(worst, solver::mode_residual(alpha, k, t, 1e-3).relative);
      }
    }
  }
  verdict(6, worst <= 2e-2, fmt("max |D^alpha u + (k^2/2) u| / |u| = %.3g (<= 2e-2), h = 1e-3", worst));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> ua(0.3, 0.95), ut(0.1, 3.0), u01(0.0, 1.0);
  double worst_si = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double alpha = ua(gen);
    const double t = ut(gen);
    const double s = t * u01(gen);
    const double series = moments::mixed_moment_stable(alpha, s, t);
    const double integral = moments::mixed_moment_integral(BernsteinSpec::stable(alpha), s, t);
    worst_si = std::max(worst_si, std::fabs(series - integral));
  }
  bool mc_ok = true;
  const std::size_t n = 100000;
  const double dt = 1e-3;
  struct Case {
    double alpha, s, t;
  };
  for (const Case c : {Case{0.5, 0.5, 1.0}, Case{0.4, 0.3, 1.2}, Case{0.7, 0.8, 2.0}}) {
    moments::MomentReport r = moments::mixed_moment_mc(BernsteinSpec::stable(c.alpha), c.s, c.t, n, dt,
                                                       RngStream{kSeed, 7}.child(static_cast<std::uint64_t>(c.alpha * 100)));
    const double series = moments::mixed_moment_stable(c.alpha, c.s, c.t);
    const double integral = moments::mixed_moment_integral(BernsteinSpec::stable(c.alpha), c.s, c.t);
    const bool ok = std::fabs(series - r.mc) <= 3.0 * r.se + dt && std::fabs(integral - r.mc) <= 3.0 * r.se + dt;
    mc_ok = mc_ok && ok;
    diag("alpha=%.1f s=%.1f t=%.1f: series %.6f integral %.6f mc %.6f +- %.6f %s", c.alpha, c.s, c.t, series, integral, r.mc,
         r.se, ok ? "ok" : "off");
  }
  const double exact1 = std::exp(-0.5);
  const BernsteinSpec classical = BernsteinSpec::classical();
  const double a1 = std::max(std::fabs(moments::mixed_moment_stable(1.0, 1.0, 2.0) - exact1),
                             std::fabs(moments::mixed_moment_integral(classical, 1.0, 2.0) - exact1));
  moments::MomentReport r1 = moments::mixed_moment_mc(classical, 1.0, 2.0, n, dt, RngStream{kSeed, 8});
  const bool mc1 = std::fabs(r1.mc - exact1) <= 3.0 * r1.se;
  diag("alpha=1 s=1 t=2: analytic gap %.2g, mc %.6f +- %.6f vs e^{-1/2} = %.6f", a1, r1.mc, r1.se, exact1);
  const double printed = moments::mixed_moment_stable_series(0.5, 0.5, 1.0, 400, moments::BetaOrder::Printed).value;
  diag("series with the incomplete beta arguments in printed order B(alpha j + 1, alpha; s/t): %.6f at alpha=0.5 s=0.5 t=1",
       printed);
  const double secs = seconds_since(t0);
  verdict(7, worst_si <= 1e-6 && mc_ok && a1 <= 1e-8 && mc1,
          fmt("series vs integral %.2g (<= 1e-6) on 10 random points, MC within 3 SE, alpha=1 gap %.2g; %.1f s", worst_si,
              a1, secs));
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  std::mt19937_64 gen(kSeed + 8);
  std::uniform_real_distribution<double> lt(std::log(0.05), std::log(20.0));
  double identity = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = std::exp(lt(gen));
    const double b = std::exp(lt(gen));
    const double c = moments::covariance_laplace(spec, a, b);
    identity = std::max(identity, std::fabs(c - moments::joint_exp_laplace(spec, 1.5, 0.5, a, b)) / std::fabs(c));
  }
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.04 * i);
  const RngStream stream{kSeed, 9};
  const moments::Surface v = moments::exp_functional_surface(spec, 1.5, 0.5, grid, 10000, 1e-3, stream);
  const moments::Surface sym = moments::product_moment_surface(spec, grid, 10000, 1e-3, stream);
  double worst = 0.0;
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
    const double cov = moments::covariance_laplace(spec, a, b);
    const double mcv = laplace::forward_double_laplace(grid, grid, v.mean, a, b).value;
    const double mcs = laplace::forward_double_laplace(grid, grid, sym.mean, a, b).value;
    worst = std::max(worst, std::fabs(mcv - cov) / cov);
    diag("theta=(%g,%g): closed form %.5f, transform of MC E exp(-1.5E(t1)-0.5E(t2)) %.5f, of symmetric E[B(t1)B(t2)] %.5f", a,
         b, cov, mcv, mcs);
  }
  const moments::SymmetryScan scan = moments::covariance_symmetry_scan(spec, 0.1, 10.0, 21);
  diag("closed form is not symmetric in (theta1, theta2): max relative asymmetry %.3f at (%g, %g)",
       scan.max_relative_asymmetry, scan.worst_theta1, scan.worst_theta2);
  const double secs = seconds_since(t0);
  verdict(8, identity <= 1e-12 && worst <= 0.05,
          fmt("identity gap %.2g (<= 1e-12), MC surface transform within %.2f%% (<= 5%%); %.1f s", identity, 100.0 * worst,
              secs));
}

void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  ctrw::CtrwConfig base;
  base.alpha = 0.5;
  const std::vector<double> scales{1e2, 1e3, 1e4};
  const ctrw::ConvergenceReport rep = ctrw::convergence_report(base, 1.0, 3, scales, 100000, RngStream{kSeed, 10});
  for (const ctrw::ConvergenceRow& r : rep.rows) {
    if (r.k == 0) continue;
    diag("c=%-6g k=%d mc %.6f +- %.6f  d_k %.6f  |err| %.2e  exact CTRW bias %.2e  raw imag %.4f +- %.4f", r.c, r.k,
         r.empirical_re, r.se, r.dk, r.abs_error, r.exact_error, r.raw.value.imag(), r.raw.se_im);
  }
  for (std::size_t k = 0; k < rep.gamma.size(); ++k) {
    diag("k=%zu: fitted gamma from MC errors %.3f, from exact bias %.3f", k + 1, rep.gamma[k], rep.exact_gamma[k]);
  }
  const double secs = seconds_since(t0);
  verdict(9, rep.all_monotone() && rep.gamma_mean > 0.0 && secs < 300.0,
          std::string("errors non-increasing in c within 2 SE: ") + (rep.all_monotone() ? "yes" : "no") +
              fmt(", fitted gamma %.3f (> 0), %.0f s", rep.gamma_mean, secs));
}

void criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> one{1.0};
  const std::vector<cplx> z11{1.0, 1.0};
  const kernels::KernelTable classical = kernels::build_table_k2(BernsteinSpec::classical(), {0.0, 1.0, 2.0, 4.0}, one);
  const moments::Matrix qc = moments::nd_covariance(classical, z11, 1.0);
  const double gap1 = std::max(std::abs(qc[0][0] - (1.0 - std::exp(-1.0))), std::abs(qc[0][1] - (std::exp(-2.0) - std::exp(-1.0))));

  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  const kernels::KernelTable table = kernels::build_table_k2(spec, {0.0, 1.0, 2.0, 4.0}, one);
  const std::vector<cplx> z{1.0, cplx(0.0, 1.0)};
  const moments::Matrix printed = moments::nd_covariance(table, z, 1.0);
  const moments::Matrix corrected = moments::nd_covariance_independent(table, z, 1.0);
  const std::size_t n = 100000;
  const double dt = 1e-3;
  const moments::MatrixEstimate defined = moments::nd_covariance_mc(spec, z, 1.0, n, dt, RngStream{kSeed, 11},
                                                                    moments::Coupling::Independent,
                                                                    moments::Product::Conjugated);
  auto within = [&](const moments::Matrix& q, const moments::MatrixEstimate& m) {
    bool ok = true;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        ok = ok && std::fabs(q[i][j].real() - m.mean[i][j].real()) <= 3.0 * m.se_re[i][j] + dt &&
             std::fabs(q[i][j].imag() - m.mean[i][j].imag()) <= 3.0 * m.se_im[i][j] + dt;
      }
    }
    return ok;
  };
  auto show = [&](const char* name, const moments::Matrix& q) {
    diag("%s: q11 (%.4f,%.4f) q12 (%.4f,%.4f) q21 (%.4f,%.4f) q22 (%.4f,%.4f)", name, q[0][0].real(), q[0][0].imag(),
         q[0][1].real(), q[0][1].imag(), q[1][0].real(), q[1][0].imag(), q[1][1].real(), q[1][1].imag());
  };
  const bool mc_ok = within(printed, defined);
  show("printed formula, z=(1,i)", printed);
  show("MC, independent B_j, E[X_i conj X_j] - E X_i E conj X_j", defined.mean);
  show("corrected formula for that process", corrected);
  diag("corrected formula vs MC: %s", within(corrected, defined) ? "within 3 SE" : "outside 3 SE");
  const std::vector<cplx> zr{1.0, 0.5};
  const moments::MatrixEstimate shared = moments::nd_covariance_mc(spec, zr, 1.0, n, dt, RngStream{kSeed, 12},
                                                                   moments::Coupling::Shared, moments::Product::OffDiagPlain);
  diag("printed formula vs MC with one shared B and unconjugated off-diagonal products, z=(1,0.5): %s",
       within(moments::nd_covariance(table, zr, 1.0), shared) ? "within 3 SE" : "outside 3 SE");
  const double secs = seconds_since(t0);
  verdict(10, gap1 <= 1e-10 && mc_ok,
          fmt("alpha=1 entries gap %.2g (<= 1e-10); alpha=0.5 printed entries vs MC of the defined process: ", gap1) +
              (mc_ok ? "within 3 SE" : "outside 3 SE") + fmt("; %.1f s", secs));
}

void criterion11() {
  const auto t0 = std::chrono::steady_clock::now();
  const double t = 1.0;
  const std::vector<double> times{t};
  // The trapezoid rule on mass_points nodes integrates the truncated series
  // exactly, since it has fewer than mass_points modes.
  const int mass_points = 2 * wrapped::kMaxFourierOrder;
  double mass_gap = 0.0;
  for (double alpha : {0.5, 0.8, 1.0}) {
    const kernels::KernelTable table = wrapped::density_table(BernsteinSpec::stable(alpha), times);
    double s = 0.0;
    for (int i = 0; i < mass_points; ++i) {
      s += wrapped::wrapped_density(table, wrapped::Angle(2.0 * kPi * i / mass_points), t).value;
    }
    mass_gap = std::max(mass_gap, std::fabs(s * 2.0 * kPi / mass_points - 1.0));
  }
  const int m = 256;
  const kernels::KernelTable classical = wrapped::density_table(BernsteinSpec::classical(), times);
  double normal_gap = 0.0;
  for (int i = 0; i < m; ++i) {
    const wrapped::Angle phi(2.0 * kPi * i / m);
    normal_gap = std::max(normal_gap, std::fabs(wrapped::wrapped_density(classical, phi, t).value -
                                                wrapped::wrapped_normal_pdf({0.0, t}, phi)));
  }
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  const kernels::KernelTable table = wrapped::density_table(spec, times);
  const auto theta = wrapped::sample_wrapped_paths(spec, times, 100000, 1e-3, RngStream{kSeed, 13});
  const std::vector<double> p = wrapped::wrapped_bin_probabilities(table, t, 64);
  const wrapped::TestResult chi = wrapped::chi_square_gof(theta[0], p);
  const double secs = seconds_since(t0);
  verdict(11, mass_gap <= 1e-8 && normal_gap <= 1e-8 && chi.pass(),
          fmt("mass gap %.2g, alpha=1 vs wrapped normal %.2g (both <= 1e-8), chi-square %.1f", mass_gap, normal_gap,
              chi.statistic) +
              fmt(" < %.1f (p = %.3f), %.1f s", chi.critical, chi.p_value, secs));
}

void criterion12() {
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  const std::vector<int> r_list{1, 2, 3};
  const auto rows = moments::convention_adjudication(spec, r_list, 1.0, 100000, 1e-3, RngStream{kSeed, 14});
  bool pass = true;
  for (const auto& row : rows) {
    diag("r=%d: inversion eta=r^2/2 %.5f (%s), eta=r/2 %.5f (%s), MC %.5f +- %.5f", row.r, row.inverted_r2,
         row.r2_pass ? "match" : "no match", row.inverted_r, row.r_pass ? "match" : "no match", row.mc, row.se);
    pass = pass && row.r2_pass && (row.r < 2 || !row.r_pass);
  }
  verdict(12, pass, "eta = r^2/2 matches MC for r in {1,2,3}; eta = r/2 is rejected for r >= 2");
}

}  // namespace

int main() {
  std::printf("fracdisk acceptance run, seed %llu, %u worker thread(s)\n", static_cast<unsigned long long>(kSeed),
              mc::thread_count());
  const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
                                               criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      verdict(static_cast<int>(i + 1), false, std::string("raised: ") + e.what());
    }
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
