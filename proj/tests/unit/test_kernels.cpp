#include <cmath>
#include <initializer_list>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <doctest.h>

#include "fracdisk/bernstein.hpp"
#include "fracdisk/errors.hpp"
#include "fracdisk/kernels.hpp"

using namespace fracdisk;

TEST_CASE("stable closed form at alpha = 1/2") {
  CHECK(kernels::dk_stable(0.5, 1, 1.0) == doctest::Approx(0.6156903441929259).epsilon(1e-14));
  CHECK(kernels::dk_stable(0.5, 2, 1.0) == doctest::Approx(std::exp(4.0) * boost::math::erfc(2.0)).epsilon(1e-13));
  CHECK(kernels::dk_stable(0.5, 0, 3.0) == 1.0);
  CHECK(kernels::dk_stable(0.5, 3, 0.0) == 1.0);
  CHECK(kernels::dk_stable(1.0, 2, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("numeric inversion reproduces the closed forms") {
  for (double alpha : {0.3, 0.5, 0.9}) {
    for (int k : {1, 3}) {
      for (double t : {0.2, 1.0, 4.0}) {
        const double exact = kernels::dk_stable(alpha, k, t);
        CHECK(kernels::dk_numeric(BernsteinSpec::stable(alpha), k, t) == doctest::Approx(exact).epsilon(1e-6));
      }
    }
  }
  CHECK(kernels::dk_numeric(BernsteinSpec::classical(), 2, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("tempered quadrature collapses to the stable kernel and matches inversion") {
  for (int k : {1, 2, 4}) {
    for (double t : {0.3, 1.0, 3.0}) {
      CHECK(kernels::dk_tempered(0.6, 0.0, k, t) == doctest::Approx(kernels::dk_stable(0.6, k, t)).epsilon(1e-7));
      const double q = kernels::dk_tempered(0.6, 1.0, k, t);
      CHECK(q == doctest::Approx(kernels::dk_numeric(BernsteinSpec::tempered(0.6, 1.0), k, t)).epsilon(1e-5));
    }
  }
  CHECK(kernels::dk_tempered(0.6, 1.0, 0, 2.0) == 1.0);
}

TEST_CASE("tempering slows the clock's inverse down") {
  // a tempered clock runs slower, so E(t) grows faster and d_k is smaller
  for (double t : {0.5, 2.0}) {
    CHECK(kernels::dk_tempered(0.5, 2.0, 1, t) < kernels::dk_stable(0.5, 1, t));
  }
}

TEST_CASE("drift makes the inverse clock smaller") {
  const double plain = kernels::dk(BernsteinSpec::stable(0.5), 1.0, 1.0);
  const double drift = kernels::dk(BernsteinSpec::stable(0.5, 0.5), 1.0, 1.0);
  CHECK(drift > plain);
  CHECK(kernels::resolve_method(BernsteinSpec::stable(0.5, 0.5), kernels::Method::Auto) == kernels::Method::Numeric);
  CHECK_THROWS_AS(kernels::resolve_method(BernsteinSpec::tempered(0.5, 1.0), kernels::Method::ClosedForm), DomainError);
}

TEST_CASE("method names") {
  for (auto m : {kernels::Method::Auto, kernels::Method::ClosedForm, kernels::Method::Quadrature,
                 kernels::Method::Numeric}) {
    CHECK(kernels::parse_method(kernels::method_name(m)) == m);
  }
  CHECK_THROWS_AS(kernels::parse_method("fast"), ConfigError);
}

TEST_CASE("n-dimensional kernel uses the summed squares") {
  const std::vector<int> kv{1, 2, 2};
  CHECK(kernels::dk_nd(BernsteinSpec::stable(0.5), kv, 1.0) ==
        doctest::Approx(kernels::dk_stable(0.5, 3, 1.0)).epsilon(1e-14));
}

TEST_CASE("kernel tables: lookup, coverage and invariants") {
  const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
  for (const BernsteinSpec& spec : {BernsteinSpec::stable(0.4), BernsteinSpec::tempered(0.7, 0.5)}) {
    const kernels::KernelTable table = kernels::build_table(spec, 6, times);
    CHECK(table.k_max() == 6);
    CHECK_NOTHROW(kernels::check_invariants(table));
    for (double t : times) CHECK(table.lookup(0, t) == 1.0);
    for (int k = 0; k <= 6; ++k) CHECK(table.lookup(k, 0.0) == 1.0);
    for (int k = 1; k <= 6; ++k) {
      for (std::size_t j = 1; j < times.size(); ++j) {
        CHECK(table.lookup(k, times[j]) <= table.lookup(k - 1, times[j]));
        CHECK(table.lookup(k, times[j]) <= table.lookup(k, times[j - 1]));
        CHECK(table.lookup(k, times[j]) > 0.0);
      }
    }
    CHECK_FALSE(table.covers(49.0, 1.0));
    CHECK_THROWS_AS(table.lookup(7, 1.0), CoverageError);
    CHECK_THROWS_AS(table.lookup(1, 0.75), CoverageError);
  }
}

TEST_CASE("invariant check names the broken entry") {
  kernels::KernelTable table = kernels::build_table(BernsteinSpec::stable(0.5), 2, std::vector<double>{1.0, 2.0});
  table.values[1 * 2 + 1] = 0.9;  // d_1(2) > d_1(1)
  CHECK_THROWS_AS(kernels::check_invariants(table), InvariantError);
}

TEST_CASE("kernel CSV has the documented header and 17 digits") {
  const kernels::KernelTable table = kernels::build_table(BernsteinSpec::stable(0.5), 1, std::vector<double>{1.0});
  std::ostringstream os;
  kernels::write_table_csv(os, table);
  const std::string s = os.str();
  CHECK(s.rfind("k,t,dk,method\n", 0) == 0);
  CHECK(s.find("1,1,0.615690344192925") != std::string::npos);
}
