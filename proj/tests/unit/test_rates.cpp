#include <doctest.h>

#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/graph/cutoff.hpp"
#include "invman/graph/rates.hpp"

using namespace invman;

namespace {

Mat saddle_matrix() {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = -1.0;
  return A;
}

Nonlinearity quadratic_cut() {
  Nonlinearity q{[](double, const Vec& u) {
                   Vec out(2);
                   out << 0.0, u(0) * u(0);
                   return out;
                 },
                 1.0, true};
  return cutoff(q, 2, 0.15, 3.0).as_nonlinearity();
}

struct Setup {
  Generator gen = Generator::autonomous(saddle_matrix());
  SplittingCertificate cert = estimate_splitting(gen, 1, TimeGrid(-1.0, 1.0, 2));
};

std::vector<RateSample> samples(std::initializer_list<double> xs) {
  std::vector<RateSample> out;
  for (double x : xs) {
    Vec a(1);
    a << x;
    out.push_back({0.0, a});
  }
  return out;
}

}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("linear diagonal rates are the eigenvalues") {
    Setup s;
    const Nonlinearity f = zero_nonlinearity(2);
    const ConstantsLedger L = constants_ledger(s.cert.M, s.cert.gamma, s.cert.rho, 0.0);
    SaddlePair pair = saddle_point(s.gen, s.cert, f, L, GridSpec::uniform(1, 1.0, 11), GridSpec::uniform(1, 1.0, 11));
    RatesReport ru = verify_rates(pair.unstable.field, s.gen, f, L, samples({0.01, -0.02}));
    REQUIRE(ru.checks.size() == 2);
    CHECK(ru.checks[0].measured == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(ru.checks[1].measured == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ru.pass);
    RatesReport rs = verify_rates(pair.stable.field, s.gen, f, L, samples({0.5, -0.3}));
    REQUIRE(rs.checks.size() == 2);
    CHECK(rs.checks[0].measured == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rs.checks[1].measured == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rs.pass);
  }

  TEST_CASE("quadratic case meets the attraction and growth bounds") {
    Setup s;
    const Nonlinearity f = quadratic_cut();
    const ConstantsLedger L = constants_ledger(s.cert.M, s.cert.gamma, s.cert.rho, f.lipschitz);
    SaddlePair pair = saddle_point(s.gen, s.cert, f, L, GridSpec::uniform(1, 0.15, 61), GridSpec::uniform(1, 0.15, 61));
    RateOptions o;
    o.horizon = 3.0;
    RatesReport ru = verify_rates(pair.unstable.field, s.gen, f, L, samples({0.005, -0.004, 0.002}), o);
    CHECK(ru.pass);
    CHECK(ru.checks[1].measured >= L.delta - 0.05);
    CHECK(ru.checks[0].measured <= L.manifold_growth() + 0.05);
    RatesReport rs = verify_rates(pair.stable.field, s.gen, f, L, samples({0.1, -0.08}), o);
    CHECK(rs.pass);
  }

  TEST_CASE("asymptotic phase in the decoupled linear case") {
    Setup s;
    const Nonlinearity f = zero_nonlinearity(2);
    const ConstantsLedger L = constants_ledger(s.cert.M, s.cert.gamma, s.cert.rho, 0.0);
    GraphSolution sig = solve_sigma(s.gen, s.cert, f, L, GridSpec::uniform(1, 1e4, 5));
    Vec u0(2);
    u0 << 1.0, 1.0;
    PhaseResult r = asymptotic_phase(sig.field, s.gen, f, L, u0, 0.0, 5.0 / L.delta);
    CHECK(r.fitted_rate == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.pass);
    CHECK(r.shadow.at(2.0)(0) == doctest::Approx(std::exp(2.0)).epsilon(1e-6));
    CHECK(r.distances.back() == doctest::Approx(std::exp(-5.0 / L.delta)).epsilon(1e-4));
  }

  TEST_CASE("asymptotic phase on the quadratic manifold") {
    Setup s;
    const Nonlinearity f = quadratic_cut();
    const ConstantsLedger L = constants_ledger(s.cert.M, s.cert.gamma, s.cert.rho, f.lipschitz);
    GraphSolution sig = solve_sigma(s.gen, s.cert, f, L, GridSpec::uniform(1, 0.15, 241));
    Vec u0(2);
    u0 << 1e-7, 0.1;
    PhaseResult r = asymptotic_phase(sig.field, s.gen, f, L, u0, 0.0, 5.0 / L.delta);
    CHECK(r.fitted_rate >= 0.9 * L.delta);
    CHECK(r.pass);
    CHECK(r.cauchy <= 1e-8);
  }

  TEST_CASE("start on the manifold has zero distance") {
    Setup s;
    const Nonlinearity f = zero_nonlinearity(2);
    const ConstantsLedger L = constants_ledger(s.cert.M, s.cert.gamma, s.cert.rho, 0.0);
    GraphSolution sig = solve_sigma(s.gen, s.cert, f, L, GridSpec::uniform(1, 1e4, 5));
    Vec u0(2);
    u0 << 0.3, 0.0;
    PhaseResult r = asymptotic_phase(sig.field, s.gen, f, L, u0, 0.0, 5.0 / L.delta);
    for (double d : r.distances) CHECK(d <= 1e-9);
    CHECK(r.pass);
    CHECK_THROWS_AS(asymptotic_phase(sig.field, s.gen, f, L, u0, 0.0, 1.0), InvalidArgument);
  }

  TEST_CASE("saddle point requires a dichotomy") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 2.0;
    A(1, 1) = -1.0;
    Generator gen = Generator::autonomous(A);
    SplittingCertificate cert = estimate_splitting(gen, 1, TimeGrid(-1.0, 1.0, 2));
    const ConstantsLedger L = constants_ledger(cert.M, cert.gamma, cert.rho, 0.0);
    CHECK_THROWS_AS(saddle_point(gen, cert, zero_nonlinearity(2), L, GridSpec::uniform(1, 1.0, 5),
                                 GridSpec::uniform(1, 1.0, 5)),
                    PreconditionFailure);
  }
}
