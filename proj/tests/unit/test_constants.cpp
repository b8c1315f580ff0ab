#include <doctest.h>

#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/graph/constants.hpp"
#include "oracles.hpp"

using namespace invman;

namespace {
bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }
}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("gap threshold values") {
    CHECK(close(gap_threshold(1.0), 3.0 + 2.0 * std::sqrt(2.0)));
    CHECK(gap_threshold(2.0) == 16.0);
    CHECK_FALSE(gap_condition(1.0, 5.8, 0.0, 1.0).pass);
    CHECK(gap_condition(1.0, 5.9, 0.0, 1.0).pass);
    CHECK(gap_condition(1.0, 5.9, 0.0, 1.0).margin == doctest::Approx(5.9 - 5.82842712474619));
  }

  TEST_CASE("vanishing ell passes with unbounded margin") {
    double prev = 0.0;
    for (double ell : {1e-1, 1e-3, 1e-6}) {
      GapCheck g = gap_condition(1.0, 1.0, -1.0, ell);
      CHECK(g.pass);
      CHECK(g.margin > prev);
      prev = g.margin;
    }
    CHECK(std::isinf(gap_condition(1.0, 1.0, -1.0, 0.0).margin));
  }

  TEST_CASE("invalid signs are rejected") {
    CHECK_THROWS_AS(gap_condition(0.5, 1.0, -1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(gap_condition(1.0, -1.0, 1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(gap_condition(1.0, 1.0, -1.0, -0.1), InvalidArgument);
  }

  TEST_CASE("kappa roots for ratio 7") {
    ConstantsLedger c = constants_ledger(1.0, 7.0, 0.0, 1.0);
    CHECK(c.kappa_minus == doctest::Approx(0.29289).epsilon(1e-5));
    CHECK(c.kappa_plus == doctest::Approx(1.70711).epsilon(1e-5));
    CHECK(c.kappa_star == doctest::Approx(1.5));
    CHECK(c.kappa_chosen == c.kappa_minus);
  }

  TEST_CASE("ledger example against the independent re-derivation") {
    ConstantsLedger c = constants_ledger(1.0, 1.0, -1.0, 0.05);
    oracle::Constants o = oracle::constants(1.0, 1.0, -1.0, 0.05);
    CHECK(close(c.gap_threshold, o.threshold));
    CHECK(close(c.kappa_minus, o.kappa_minus));
    CHECK(close(c.kappa_plus, o.kappa_plus));
    CHECK(close(c.kappa_star, o.kappa_star));
    CHECK(close(c.delta, o.delta));
    CHECK(close(c.delta_hat, o.delta_hat));
    CHECK(close(c.nu, o.nu));
    CHECK(c.kappa_minus == doctest::Approx(0.02707).epsilon(1e-3));
    CHECK(c.delta == doctest::Approx(0.94736).epsilon(1e-4));
    CHECK(c.delta_hat == doctest::Approx(-0.94736).epsilon(1e-4));
    CHECK(0.0 < c.kappa_minus);
    CHECK(c.kappa_chosen < std::min(c.kappa_plus, c.kappa_star));
  }

  TEST_CASE("constants across a parameter sweep agree with the oracle") {
    for (double M : {1.0, 1.3, 2.0})
      for (double ell : {0.01, 0.03})
        for (double rho : {-1.0, 0.5}) {
          const double gamma = 1.5;
          if (!gap_condition(M, gamma, rho, ell).pass) continue;
          ConstantsLedger c = constants_ledger(M, gamma, rho, ell);
          oracle::Constants o = oracle::constants(M, gamma, rho, ell);
          CHECK(close(c.kappa_minus, o.kappa_minus, 1e-10));
          CHECK(close(c.delta, o.delta));
          CHECK(close(c.delta_hat, o.delta_hat));
        }
  }

  TEST_CASE("small ell limits") {
    ConstantsLedger c = constants_ledger(1.0, 1.0, -1.0, 1e-9);
    CHECK(c.kappa_minus < 1e-8);
    CHECK(c.delta == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(c.delta_hat == doctest::Approx(-1.0).epsilon(1e-8));
    ConstantsLedger z = constants_ledger(1.0, 1.0, -1.0, 0.0);
    CHECK(z.kappa_minus == 0.0);
    CHECK(z.delta == 1.0);
    CHECK(z.delta_hat == -1.0);
    CHECK(z.nu == 0.0);
  }

  TEST_CASE("gap failure is an error") {
    CHECK_THROWS_AS(constants_ledger(1.0, 1.0, -1.0, 0.4), PreconditionFailure);
  }

  TEST_CASE("tail horizon") {
    ConstantsLedger c = constants_ledger(1.0, 1.0, -1.0, 0.05);
    const double T = c.tail_horizon(1e-8);
    CHECK(std::exp(-(2.0 - 2.0 * 0.05 * (1 + c.kappa_chosen)) * T) == doctest::Approx(1e-8));
  }

  TEST_CASE("parabolic block against the oracle") {
    ConstantsLedger c = constants_ledger(1.0, 1.0, -1.0, 0.02, ParabolicParams{1.5, 0.5});
    REQUIRE(c.parabolic.has_value());
    oracle::ParabolicConstants o = oracle::parabolic(1.0, 1.5, 1.0, -1.0, 0.02, 0.5);
    CHECK(close(c.parabolic->kappa_minus, o.kappa_minus));
    CHECK(close(c.parabolic->kappa_plus, o.kappa_plus));
    CHECK(close(c.parabolic->kappa_star, o.kappa_star));
    CHECK(close(c.parabolic->delta, o.delta));
    CHECK(c.parabolic->admissible);
    CHECK(c.parabolic->delta > 0.0);
  }

  TEST_CASE("parabolic block with alpha = 0 reduces to a semilinear-type bound") {
    ConstantsLedger c = constants_ledger(1.0, 1.0, -1.0, 0.02, ParabolicParams{1.0, 0.0});
    // With alpha = 0, Gamma(1) = 1 and the closed forms are elementary.
    CHECK(close(c.parabolic->kappa_minus, 2.0 * 0.02 / (2.0 + 2.0 * 0.02)));
    CHECK(close(c.parabolic->kappa_star, (2.0 - 0.04) / 0.04 - 1.0));
  }

  TEST_CASE("ledger entries list the named constants") {
    ConstantsLedger c = constants_ledger(1.0, 1.0, -1.0, 0.05);
    bool seen = false;
    for (const auto& [k, v] : c.entries())
      if (k == "delta_hat") seen = v == c.delta_hat;
    CHECK(seen);
  }
}
