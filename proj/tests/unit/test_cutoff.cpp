#include <doctest.h>

#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/core/propagate.hpp"
#include "invman/graph/cutoff.hpp"
#include "invman/graph/shift.hpp"

using namespace invman;

namespace {

Nonlinearity quadratic() {
  return Nonlinearity{[](double, const Vec& u) {
                        Vec out(2);
                        out << 0.0, u(0) * u(0);
                        return out;
                      },
                      1.0, true};
}

Nonlinearity logistic() {
  return Nonlinearity{[](double, const Vec& u) { return (u.array() - u.array().cube()).matrix().eval(); }, 4.0, true};
}

}  // namespace

TEST_SUITE("cutoff") {
  TEST_CASE("ramp endpoints and monotonicity") {
    CHECK(smooth_ramp(-0.5) == 1.0);
    CHECK(smooth_ramp(1.5) == 0.0);
    CHECK(smooth_ramp(0.5) == doctest::Approx(0.5));
    double prev = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double v = smooth_ramp(k / 100.0);
      CHECK(v <= prev);
      prev = v;
    }
  }

  TEST_CASE("quadratic cut-off Lipschitz estimate is 2R inflated") {
    CutoffNonlinearity c = cutoff(quadratic(), 2, 0.15, 3.0);
    CHECK(c.effective_ell() == doctest::Approx(0.3 * 1.1).epsilon(0.01));
    CHECK(c.effective_ell() >= 0.3);
  }

  TEST_CASE("cut-off agrees with f on the ball and vanishes outside") {
    CutoffNonlinearity c = cutoff(quadratic(), 2, 0.15, 3.0);
    Vec u(2);
    u << 0.075 / std::sqrt(2.0), -0.075 / std::sqrt(2.0);
    CHECK(c(0.0, u) == quadratic()(0.0, u));
    u << 3.2, 0.0;
    CHECK(c(0.0, u).norm() == 0.0);
    u << 1.0, 0.0;
    CHECK(c(0.0, u).norm() <= quadratic()(0.0, (0.15 / 1.0) * u).norm());
  }

  TEST_CASE("zero nonlinearity has zero effective ell") {
    CHECK(cutoff(zero_nonlinearity(3), 3, 1.0, 1.0).effective_ell() == 0.0);
  }

  TEST_CASE("sampled Lipschitz bound dominates random secant slopes") {
    CutoffNonlinearity c = cutoff(quadratic(), 2, 0.15, 0.3);
    Vec a(2), b(2);
    double worst = 0.0;
    for (int k = 0; k < 400; ++k) {
      const double r1 = 0.5 * std::fmod(k * 0.618034, 1.0), r2 = 0.5 * std::fmod(k * 0.41421, 1.0);
      a << r1 * std::cos(k), r1 * std::sin(k);
      b << r2 * std::cos(3.0 * k), r2 * std::sin(3.0 * k);
      if ((a - b).norm() < 1e-9) continue;
      worst = std::max(worst, (c(0.0, a) - c(0.0, b)).norm() / (a - b).norm());
    }
    CHECK(worst <= c.effective_ell());
  }

  TEST_CASE("invalid radii") {
    CHECK_THROWS_AS(cutoff(quadratic(), 2, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(cutoff(quadratic(), 2, 1.0, -1.0), InvalidArgument);
  }

  TEST_CASE("shift along u* = 1 of u' = u - u^3") {
    Generator g = Generator::autonomous(Mat::Zero(1, 1), logistic());
    std::vector<double> t{0.0, 1.0, 2.0};
    std::vector<Vec> u(3, Vec::Ones(1));
    Generator s = shift_to_solution(g, Trajectory(t, u));
    CHECK(s.linear(0.5)(0, 0) == doctest::Approx(-2.0).epsilon(1e-8));
    const Nonlinearity& gn = s.nonlinearity();
    for (double v : {-0.3, 0.1, 0.7}) {
      Vec x(1);
      x << v;
      CHECK(gn(0.5, x)(0) == doctest::Approx(-3 * v * v - v * v * v).epsilon(1e-8));
    }
    CHECK(gn(0.5, Vec::Zero(1))(0) == 0.0);
  }

  TEST_CASE("shift along u* = 0 leaves a flat-at-zero generator unchanged") {
    Mat a(2, 2);
    a << 1, 0, 0, -1;
    Generator g = Generator::autonomous(a, quadratic());
    std::vector<Vec> u(2, Vec::Zero(2));
    Generator s = shift_to_solution(g, Trajectory({0.0, 1.0}, u));
    CHECK((s.linear(0.3) - a).norm() < 1e-10);
  }

  TEST_CASE("linear f gives g = 0") {
    Mat b(2, 2);
    b << 0.1, 0.2, -0.3, 0.05;
    Nonlinearity lin{[b](double, const Vec& u) { return (b * u).eval(); }, 0.4, true};
    Generator g = Generator::autonomous(Mat::Zero(2, 2), lin);
    Vec u0(2);
    u0 << 0.2, -0.1;
    Trajectory tr = flow(g, 0.0, 1.0, u0, 1e-3);
    Generator s = shift_to_solution(g, tr);
    Vec v(2);
    v << 0.5, 0.7;
    CHECK(s.nonlinearity()(0.4, v).norm() < 1e-9);
    CHECK((s.linear(0.4) - b).norm() < 1e-8);
  }

  TEST_CASE("shift rejects a non-solution") {
    Generator g = Generator::autonomous(Mat::Zero(1, 1), logistic());
    std::vector<Vec> u(2, 0.5 * Vec::Ones(1));
    CHECK_THROWS_AS(shift_to_solution(g, Trajectory({0.0, 1.0}, u)), PreconditionFailure);
  }

  TEST_CASE("shift along a time-dependent solution") {
    Generator g = Generator::autonomous(Mat::Zero(1, 1), logistic());
    Vec u0(1);
    u0 << 0.2;
    Trajectory tr = flow(g, 0.0, 2.0, u0, 1e-3);
    std::vector<Vec> derivs;
    for (const Vec& u : tr.states()) derivs.push_back(g.field(0.0, u));
    Trajectory herm(tr.times(), tr.states(), derivs);
    Generator s = shift_to_solution(g, herm);
    const double u = herm.at(1.3)(0);
    CHECK(s.linear(1.3)(0, 0) == doctest::Approx(1 - 3 * u * u).epsilon(1e-7));
  }
}
