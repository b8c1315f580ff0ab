#include <doctest.h>

#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/fine/nested.hpp"
#include "invman/graph/cutoff.hpp"

using namespace invman;

namespace {

Mat diag3() { return Eigen::Vector3d(2.0, 1.0, -1.0).asDiagonal(); }

Nonlinearity cubic(double eps) {
  Nonlinearity c{[eps](double, const Vec& u) {
                   Vec out = Vec::Zero(3);
                   out(2) = eps * u(0) * u(0) * u(0);
                   return out;
                 },
                 1.0, true};
  return cutoff(c, 3, 1.0, 3.0).as_nonlinearity();
}

struct Setup {
  Generator gen = Generator::autonomous(diag3());
  SplittingCertificate coarse = estimate_splitting(gen, 2, TimeGrid(-1.0, 1.0, 2));
  SplittingCertificate fine = estimate_splitting(gen, 1, TimeGrid(-1.0, 1.0, 2));
};

NestedOptions grids(double extent, int coarse_count, int line_count) {
  NestedOptions o;
  o.coarse_grid = GridSpec::uniform(2, extent, coarse_count);
  o.fast_grid = GridSpec::uniform(1, extent, line_count);
  o.slow_grid = GridSpec::uniform(1, extent, line_count);
  return o;
}

}  // namespace

TEST_SUITE("fine") {
  TEST_CASE("delta bar reduces to the gap without nonlinearity") {
    CHECK(delta_bar(constants_ledger(1.0, -1.0, -2.0, 0.0)) == doctest::Approx(1.0));
    const ConstantsLedger L = constants_ledger(1.0, -1.0, -2.0, 0.05);
    const double k = L.kappa_chosen;
    const double expect = 1.0 - 0.1 - 2.0 * 0.0025 * (1.0 + k) * 2.0 / (1.0 - 0.05 * (1.0 + k));
    CHECK(delta_bar(L) == doctest::Approx(expect).epsilon(1e-14));
  }

  TEST_CASE("linear case: axes and explicit ratio") {
    Setup s;
    NestedManifolds n = build_nested(s.gen, s.coarse, s.fine, zero_nonlinearity(3), grids(1.5, 7, 7));
    for (double v : n.fast.field.values()) CHECK(v == 0.0);
    for (double v : n.slow.field.values()) CHECK(v == 0.0);
    CHECK(n.delta_bar == doctest::Approx(s.fine.gamma - s.fine.rho));
    CHECK(n.reduced_cert.rank == 1);

    Vec u0(3);
    u0 << 1.0, 1.0, 0.0;
    std::vector<double> taus;
    for (int k = 1; k <= 10; ++k) taus.push_back(-0.5 * k);
    RatioSamples r = tangency_ratio(n, u0, 0.0, taus);
    REQUIRE(r.ratios.size() == 11);
    for (std::size_t k = 0; k < r.taus.size(); ++k)
      CHECK(r.ratios[k] == doctest::Approx(std::exp(r.taus[k])).epsilon(1e-7));
    CHECK(r.fitted_rate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.bound_holds);
    CHECK(r.eventually_decreasing);
    CHECK_FALSE(r.truncated);
    CHECK(r.angles.back() > r.angles.front());
    CHECK(r.angles.back() == doctest::Approx(std::atan(std::exp(5.0))).epsilon(1e-6));
  }

  TEST_CASE("cubic coupling: fast graph follows the series oracle") {
    Setup s;
    const double eps = 0.01;
    NestedManifolds n = build_nested(s.gen, s.coarse, s.fine, cubic(eps), grids(0.6, 13, 25));
    for (double x : {0.3, 0.45, 0.6, -0.5}) {
      Vec a(1);
      a << x;
      const double c = n.fast.field.lift(0.0, a)(2) / (x * x * x);
      CHECK(c == doctest::Approx(eps / 7.0).epsilon(0.1));
      CHECK(std::abs(n.fast.field.lift(0.0, a)(1)) <= 1e-9);
    }
    CHECK(n.containment <= 1e-4);

    Vec a(2);
    a << 0.4, 0.4;
    const Vec u0 = n.coarse.field.lift(0.0, a);
    std::vector<double> taus;
    for (int k = 1; k <= 8; ++k) taus.push_back(-0.5 * k);
    RatioSamples r = tangency_ratio(n, u0, 0.0, taus);
    CHECK(r.fitted_rate >= 0.9 * n.delta_bar);
    CHECK(r.bound_holds);
    CHECK(r.eventually_decreasing);
  }

  TEST_CASE("preconditions") {
    Setup s;
    CHECK_THROWS_AS(build_nested(s.gen, s.fine, s.coarse, zero_nonlinearity(3), grids(1.0, 5, 5)),
                    PreconditionFailure);
    NestedManifolds n = build_nested(s.gen, s.coarse, s.fine, zero_nonlinearity(3), grids(1.5, 7, 7));
    Vec on_fast(3);
    on_fast << 0.5, 0.0, 0.0;
    CHECK_THROWS_AS(tangency_ratio(n, on_fast, 0.0, {-1.0}), PreconditionFailure);
    Vec off_coarse(3);
    off_coarse << 0.5, 0.5, 0.5;
    CHECK_THROWS_AS(tangency_ratio(n, off_coarse, 0.0, {-1.0}), PreconditionFailure);
    Vec ok(3);
    ok << 0.5, 0.5, 0.0;
    CHECK_THROWS_AS(tangency_ratio(n, ok, 0.0, {-1.0, -0.5}), InvalidArgument);
  }
}
