#include <cmath>
#include <complex>
#include <initializer_list>
#include <random>
#include <vector>

#include <doctest.h>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/kernels.hpp"
#include "fracdisk/moments.hpp"
#include "fracdisk/specfun.hpp"

using namespace fracdisk;
using cplx = std::complex<double>;

TEST_CASE("circular moments are kernel values") {
  const std::vector<double> times{1.0};
  const kernels::KernelTable table = kernels::build_table(BernsteinSpec::stable(0.5), 3, times);
  CHECK(moments::circular_moment(table, 0, 1.0) == 1.0);
  CHECK(moments::circular_moment(table, 2, 0.0) == 1.0);
  CHECK(moments::circular_moment(table, 1, 1.0) == doctest::Approx(0.6156903441929259).epsilon(1e-14));
  CHECK_THROWS_AS(moments::circular_moment(table, 4, 1.0), CoverageError);
  // the same number through the inverted transform at eta = r^2 / 2
  CHECK(kernels::dk_numeric_k2(BernsteinSpec::stable(0.5), 4.0, 1.0) ==
        doctest::Approx(moments::circular_moment(table, 2, 1.0)).epsilon(1e-7));
}

TEST_CASE("transform of the r-th moment in the eta = r/2 convention") {
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  CHECK(moments::moment_laplace_paper(spec, 0.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(moments::moment_laplace_paper(spec, 1.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(moments::moment_laplace_paper(spec, 1.0, 1.0) == doctest::Approx(exp_functional_laplace(spec, 0.5, 1.0)).epsilon(1e-15));
}

TEST_CASE("joint transform: marginals and the classical clock") {
  const BernsteinSpec spec = BernsteinSpec::stable(0.6);
  CHECK(moments::joint_exp_laplace(spec, 0.0, 0.0, 1.5, 2.5) == doctest::Approx(1.0 / (1.5 * 2.5)).epsilon(1e-14));
  // eta2 = 0 leaves the one-time transform in theta1 times 1/theta2
  CHECK(moments::joint_exp_laplace(spec, 0.7, 0.0, 1.5, 2.5) ==
        doctest::Approx(exp_functional_laplace(spec, 0.7, 1.5) / 2.5).epsilon(1e-13));
  CHECK(moments::joint_exp_laplace(spec, 0.0, 0.7, 1.5, 2.5) ==
        doctest::Approx(exp_functional_laplace(spec, 0.7, 2.5) / 1.5).epsilon(1e-13));
  // E(t) = t: int int e^{-th1 t1 - th2 t2} e^{-eta1 t1 - eta2 t2} = 1/((th1 + eta1)(th2 + eta2))
  const BernsteinSpec c = BernsteinSpec::classical();
  CHECK(moments::joint_exp_laplace(c, 0.4, 1.1, 1.5, 2.5) == doctest::Approx(1.0 / (1.9 * 3.6)).epsilon(1e-13));
}

TEST_CASE("covariance transform is the joint transform at (3/2, 1/2)") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const BernsteinSpec& spec : {BernsteinSpec::stable(0.5), BernsteinSpec::tempered(0.7, 1.0)}) {
    for (int i = 0; i < 20; ++i) {
      const double a = std::exp(u(gen));
      const double b = std::exp(u(gen));
      const double c = moments::covariance_laplace(spec, a, b);
      CHECK(std::fabs(c - moments::joint_exp_laplace(spec, 1.5, 0.5, a, b)) <= 1e-12 * std::fabs(c));
    }
  }
  const auto scan = moments::covariance_symmetry_scan(BernsteinSpec::stable(0.5), 0.1, 10.0, 11);
  CHECK(scan.max_relative_asymmetry > 0.1);
}

TEST_CASE("mixed moment series: boundary cases") {
  for (double alpha : {0.3, 0.5, 0.85}) {
    CHECK(moments::mixed_moment_stable(alpha, 1.3, 1.3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moments::mixed_moment_stable(alpha, 0.0, 1.3) ==
          doctest::Approx(specfun::mittag_leffler(alpha, -std::pow(1.3, alpha) / 2.0)).epsilon(1e-13));
    // symmetric in (s, t)
    CHECK(moments::mixed_moment_stable(alpha, 0.4, 1.3) ==
          doctest::Approx(moments::mixed_moment_stable(alpha, 1.3, 0.4)).epsilon(1e-14));
  }
  CHECK(moments::mixed_moment_stable(1.0, 0.5, 2.0) == doctest::Approx(std::exp(-0.75)).epsilon(1e-12));
  const auto sv = moments::mixed_moment_stable_series(0.5, 0.5, 1.0);
  CHECK(sv.tail_bound < 1e-12);
  CHECK(sv.terms > 5);
}

TEST_CASE("mixed moment: series and integral agree") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> ua(0.25, 0.95), ut(0.05, 3.0), u01(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    const double alpha = ua(gen);
    const double t = ut(gen);
    const double s = t * u01(gen);
    CHECK(std::fabs(moments::mixed_moment_stable(alpha, s, t) -
                    moments::mixed_moment_integral(BernsteinSpec::stable(alpha), s, t)) <= 1e-6);
  }
  CHECK(moments::mixed_moment_integral(BernsteinSpec::classical(), 0.5, 2.0) == doctest::Approx(std::exp(-0.75)).epsilon(1e-10));
  CHECK_THROWS_AS(moments::mixed_moment_integral(BernsteinSpec::tempered(0.5, 1.0), 0.5, 1.0), DomainError);
}

TEST_CASE("incomplete beta argument order changes the series value") {
  const double derived = moments::mixed_moment_stable_series(0.5, 0.5, 1.0).value;
  const double printed = moments::mixed_moment_stable_series(0.5, 0.5, 1.0, 400, moments::BetaOrder::Printed).value;
  CHECK(derived == doctest::Approx(0.871224).epsilon(1e-5));
  CHECK(printed == doctest::Approx(0.744467).epsilon(1e-5));
}

TEST_CASE("mixed moment series refuses to lose accuracy silently") {
  CHECK_THROWS_AS(moments::mixed_moment_stable_series(0.5, 5e5, 1e6), NumericalError);
}

TEST_CASE("mixed moment by simulation") {
  const BernsteinSpec spec = BernsteinSpec::stable(0.6);
  moments::MomentReport r = moments::mixed_moment_mc(spec, 0.5, 1.0, 20000, 1e-3, RngStream{4, 4});
  r.analytic = moments::mixed_moment_stable(0.6, 0.5, 1.0);
  r.adjudicate(3.0, 1e-3);
  CHECK(r.pass);
  CHECK(r.quantity == "mixed_moment");
  const auto j = moments::to_json(r);
  CHECK(j.begin().key() == "quantity");
  moments::MomentReport same = moments::mixed_moment_mc(spec, 1.0, 1.0, 100, 1e-3, RngStream{4, 4});
  CHECK(same.mc == 1.0);
}

TEST_CASE("n-D covariance, printed form") {
  const std::vector<double> one{1.0};
  const kernels::KernelTable ct = kernels::build_table_k2(BernsteinSpec::classical(), {0.0, 1.0, 2.0, 4.0}, one);
  const std::vector<cplx> z11{1.0, 1.0};
  const moments::Matrix q = moments::nd_covariance(ct, z11, 1.0);
  CHECK(q[0][0].real() == doctest::Approx(0.6321205588).epsilon(1e-9));
  CHECK(q[0][1].real() == doctest::Approx(-0.2325441579).epsilon(1e-9));
  CHECK(q[1][0] == q[0][1]);
  const moments::Matrix q0 = moments::nd_covariance(ct, z11, 0.0);
  for (const auto& row : q0)
    for (cplx v : row) CHECK(v == cplx(0.0, 0.0));
  const kernels::KernelTable st = kernels::build_table_k2(BernsteinSpec::stable(0.5), {0.0, 1.0, 2.0, 4.0}, one);
  const std::vector<cplx> zi{1.0, cplx(0.0, 1.0)};
  const moments::Matrix qi = moments::nd_covariance(st, zi, 1.0);
  CHECK(qi[0][1].real() == doctest::Approx(0.0));
  CHECK(qi[0][1].imag() == doctest::Approx(-0.1236786).epsilon(1e-6));
}

TEST_CASE("n-D covariance for independent Brownian motions") {
  const std::vector<double> one{1.0};
  // classical clock: components are independent, so off-diagonal entries vanish
  const kernels::KernelTable ct = kernels::build_table_k2(BernsteinSpec::classical(), {0.0, 1.0, 2.0}, one);
  const std::vector<cplx> z{cplx(0.6, 0.2), cplx(-0.1, 0.9)};
  const moments::Matrix q = moments::nd_covariance_independent(ct, z, 1.0);
  CHECK(std::abs(q[0][1]) < 1e-15);
  CHECK(q[0][0].real() == doctest::Approx(std::norm(z[0]) * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  // Hermitian in general
  const kernels::KernelTable st = kernels::build_table_k2(BernsteinSpec::stable(0.5), {0.0, 1.0, 2.0}, one);
  const moments::Matrix h = moments::nd_covariance_independent(st, z, 1.0);
  CHECK(std::abs(h[0][1] - std::conj(h[1][0])) < 1e-15);
  CHECK(h[0][1].real() != 0.0);
}

TEST_CASE("n-D covariance formulas against simulation") {
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  const std::vector<double> one{1.0};
  const kernels::KernelTable st = kernels::build_table_k2(spec, {0.0, 1.0, 2.0, 4.0}, one);
  auto close = [](const moments::Matrix& q, const moments::MatrixEstimate& m) {
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (std::fabs(q[i][j].real() - m.mean[i][j].real()) > 4.0 * m.se_re[i][j] + 2e-3) return false;
        if (std::fabs(q[i][j].imag() - m.mean[i][j].imag()) > 4.0 * m.se_im[i][j] + 2e-3) return false;
      }
    return true;
  };
  const std::vector<cplx> z{cplx(0.8, 0.3), cplx(-0.2, 0.7)};
  const auto ind = moments::nd_covariance_mc(spec, z, 1.0, 20000, 1e-3, RngStream{6, 1}, moments::Coupling::Independent,
                                             moments::Product::Conjugated);
  CHECK(close(moments::nd_covariance_independent(st, z, 1.0), ind));
  const std::vector<cplx> zr{1.0, 0.5};
  const auto shared = moments::nd_covariance_mc(spec, zr, 1.0, 20000, 1e-3, RngStream{6, 2}, moments::Coupling::Shared,
                                                moments::Product::OffDiagPlain);
  CHECK(close(moments::nd_covariance(st, zr, 1.0), shared));
}

TEST_CASE("simulated surfaces") {
  std::vector<double> grid{0.0, 0.5, 1.0};
  const BernsteinSpec spec = BernsteinSpec::stable(0.5);
  const auto v = moments::exp_functional_surface(spec, 1.5, 0.5, grid, 2000, 1e-3, RngStream{2, 2});
  CHECK(v.mean.size() == 9);
  CHECK(v.mean[0] == 1.0);
  const auto p = moments::product_moment_surface(spec, grid, 2000, 1e-3, RngStream{2, 2});
  CHECK(p.mean[1 * 3 + 2] == doctest::Approx(p.mean[2 * 3 + 1]));
  const std::vector<double> bad{0.5, 1.0};
  CHECK_THROWS_AS(moments::product_moment_surface(spec, bad, 10, 1e-3, RngStream{2, 2}), DomainError);
}
