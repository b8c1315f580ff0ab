#include <doctest.h>

#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/dichotomy/splitting.hpp"
#include "oracles.hpp"

using namespace invman;

namespace {

Mat diag(std::initializer_list<double> entries) {
  Vec v(entries.size());
  int i = 0;
  for (double e : entries) v(i++) = e;
  return v.asDiagonal();
}

Mat swap2() {
  Mat s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

SplittingOptions opts(double window) {
  SplittingOptions o;
  o.window = window;
  o.step = 1e-2;
  return o;
}

}  // namespace

TEST_SUITE("dichotomy") {
  TEST_CASE("diagonal saddle gives the spectral projection") {
    Generator g = Generator::autonomous(diag({1, -1}));
    SplittingCertificate c = estimate_splitting(g, 1, TimeGrid(-1, 1, 4), opts(6.0));
    for (const Mat& q : c.projections) CHECK((q - diag({1, 0})).norm() < 1e-8);
    CHECK(std::abs(c.M - 1.0) < 1e-8);
    CHECK(std::abs(c.gamma - 1.0) < 1e-8);
    CHECK(std::abs(c.rho + 1.0) < 1e-8);
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("rank two of diag(2,1,-1): rho is set by the slowest image direction") {
    Generator g = Generator::autonomous(diag({2, 1, -1}));
    SplittingCertificate c = estimate_splitting(g, 2, TimeGrid(-1, 1, 4), opts(6.0));
    for (const Mat& q : c.projections) CHECK((q - diag({1, 1, 0})).norm() < 1e-8);
    CHECK(std::abs(c.gamma - 1.0) < 1e-8);
    // Direct evaluation: ||e^{A(t-s)} Q|| for t <= s is max(e^{2(t-s)}, e^{(t-s)}) = e^{(t-s)},
    // so the slower image direction sets rho = -1.
    CHECK(std::abs(c.rho + 1.0) < 1e-8);
    CHECK(std::abs(c.M - 1.0) < 1e-8);
  }

  TEST_CASE("perturbed constant matrix matches its eigenprojection") {
    Mat a = diag({1, -1}) + 0.05 * swap2();
    Generator g = Generator::autonomous(a);
    SplittingCertificate c = estimate_splitting(g, 1, TimeGrid(-1, 1, 2), opts(6.0));
    const Mat exact = oracle::eigenprojection(a, 1);
    for (const Mat& q : c.projections) {
      CHECK(op_norm(q - diag({1, 0})) < 0.03);
      CHECK(op_norm(q - exact) < 1e-8);
    }
    CHECK(verify_splitting(g, c, 50).pass);
  }

  TEST_CASE("rotation has no splitting") {
    Mat a(2, 2);
    a << 0, 1, -1, 0;
    CHECK_THROWS_AS(estimate_splitting(Generator::autonomous(a), 1, TimeGrid(0, 1, 2), opts(5.0)), DegenerateGap);
  }

  TEST_CASE("verification of exact and inflated certificates") {
    Generator g = Generator::autonomous(diag({1, -1}));
    SplittingCertificate c = estimate_splitting(g, 1, TimeGrid(-2, 2, 8), opts(6.0));
    SplittingReport ok = verify_splitting(g, c, 100);
    CHECK(ok.pass);
    CHECK(ok.worst_forward <= 1.0 + 1e-9);
    CHECK(ok.worst_backward <= 1.0 + 1e-9);
    CHECK(ok.commutation <= 1e-10);

    SplittingCertificate bad = c;
    bad.gamma *= 1.1;
    SplittingReport fail = verify_splitting(g, bad, 100);
    CHECK_FALSE(fail.pass);
    CHECK(fail.worst_forward == doctest::Approx(std::exp(0.1 * 4.0) / c.M).epsilon(1e-6));
  }

  TEST_CASE("non-normal transient is absorbed into M") {
    Mat a(2, 2);
    a << 1, 3, 0, -1;
    Generator g = Generator::autonomous(a);
    SplittingCertificate c = estimate_splitting(g, 1, TimeGrid(-2, 2, 16), opts(12.0));
    CHECK(c.M > 1.0);
    CHECK(op_norm(c.projections[3] - oracle::eigenprojection(a, 1)) < 1e-8);
    CHECK(verify_splitting(g, c, 200).pass);
  }

  TEST_CASE("time-periodic generator is certified") {
    Generator g(2, [](double t) {
      Mat a(2, 2);
      a << 1.0 + 0.3 * std::sin(t), 0.2 * std::cos(t), 0.1, -1.0;
      return a;
    });
    SplittingCertificate c = estimate_splitting(g, 1, TimeGrid(-3, 3, 30), opts(8.0));
    CHECK_NOTHROW(c.validate());
    SplittingReport rep = verify_splitting(g, c, 400);
    CHECK(rep.worst_forward <= 1.0 + 1e-6);
    CHECK(rep.worst_backward <= 1.0 + 1e-6);
    CHECK(rep.commutation < 1e-6);
  }

  TEST_CASE("rank zero and full rank conventions") {
    Generator stable = Generator::autonomous(diag({-2, -3}));
    SplittingCertificate c0 = estimate_splitting(stable, 0, TimeGrid(0, 1, 2), opts(4.0));
    CHECK(c0.gamma == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(c0.rho == doctest::Approx(-2.0).epsilon(1e-8));
    Generator unstable = Generator::autonomous(diag({2, 3}));
    SplittingCertificate cd = estimate_splitting(unstable, 2, TimeGrid(0, 1, 2), opts(4.0));
    CHECK(cd.rho == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(cd.gamma > cd.rho);
    CHECK(verify_splitting(unstable, cd, 10).pass);
  }

  TEST_CASE("shift to dichotomy keeps the projections and passes") {
    Generator g = Generator::autonomous(diag({2, 1, -1}));
    SplittingCertificate fine = estimate_splitting(g, 1, TimeGrid(-1, 1, 4), opts(8.0));
    CHECK(verify_splitting(g, fine, 50).pass);
    ShiftedDichotomy s = shift_to_dichotomy(g, fine);
    CHECK(s.certificate.gamma == doctest::Approx(-s.certificate.rho));
    CHECK(s.certificate.gamma == doctest::Approx(0.5 * (fine.gamma - fine.rho)));
    CHECK(s.certificate.projections == fine.projections);
    CHECK(verify_splitting(s.generator, s.certificate, 50).pass);
  }

  TEST_CASE("nestedness on diag(2,1,-1) and a rotated copy") {
    Generator g = Generator::autonomous(diag({2, 1, -1}));
    TimeGrid grid(-1, 1, 2);
    SplittingCertificate coarse = estimate_splitting(g, 2, grid, opts(8.0));
    SplittingCertificate fine = estimate_splitting(g, 1, grid, opts(8.0));
    NestednessReport rep = nestedness_check(coarse, fine);
    CHECK(rep.pass);
    CHECK(rep.image_residual < 1e-12);
    CHECK(rep.kernel_residual < 1e-12);

    Mat r = oracle::random_orthogonal(3, 11);
    Generator rot = Generator::autonomous(r * diag({2, 1, -1}) * r.transpose());
    NestednessReport rrep =
        nestedness_check(estimate_splitting(rot, 2, grid, opts(8.0)), estimate_splitting(rot, 1, grid, opts(8.0)));
    CHECK(rrep.image_residual <= 1e-8);
    CHECK(rrep.kernel_residual <= 1e-8);

    CHECK_THROWS_AS(nestedness_check(fine, coarse), StructuralError);
  }
}
