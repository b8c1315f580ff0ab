#include <doctest.h>

#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/core/linalg.hpp"
#include "invman/roughness/roughness.hpp"
#include "oracles.hpp"

using namespace invman;

namespace {

Mat saddle() {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = -1.0;
  return A;
}

Mat swap(double s) {
  Mat B = Mat::Zero(2, 2);
  B(0, 1) = s;
  B(1, 0) = s;
  return B;
}

struct Setup {
  Generator gen = Generator::autonomous(saddle());
  SplittingCertificate cert = estimate_splitting(gen, 1, TimeGrid(-1.0, 1.0, 2));
};

}  // namespace

TEST_SUITE("roughness") {
  TEST_CASE("perturbation bound closed form") {
    CHECK(perturbation_bound(1.0, 1.0, 0.05).bound == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(perturbation_bound(1.0, 1.0, 0.05).pass);
    CHECK(perturbation_bound(1.0, 2.0, 0.0).bound == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(perturbation_bound(1.0, 2.0, 0.0).pass);
    CHECK_FALSE(perturbation_bound(1.0, 1.0, 0.34).pass);
    CHECK_THROWS_AS(perturbation_bound(-1.0, 1.0, 0.1), InvalidArgument);
  }

  TEST_CASE("zero perturbation leaves the projection unchanged") {
    Setup s;
    const Perturbation B = Perturbation::constant(Mat::Zero(2, 2));
    LinearGraphs g = linear_graphs(s.gen, s.cert, B);
    for (double v : g.sigma.field.values()) CHECK(v == 0.0);
    for (double v : g.theta.field.values()) CHECK(v == 0.0);
    PerturbedDichotomy pd = certify_perturbed(s.gen, s.cert, B, g);
    CHECK(pd.distance <= 1e-14);
    CHECK(pd.M_ell >= s.cert.M);
    CHECK(pd.pass);
  }

  TEST_CASE("swap perturbation matches the eigen-decomposition oracle") {
    Setup s;
    const Perturbation B = Perturbation::constant(swap(0.05));
    LinearGraphs g = linear_graphs(s.gen, s.cert, B);
    const double lam = std::sqrt(1.0025);
    Vec a(1);
    a << 1.0;
    CHECK(g.sigma.field.eval(0.0, a)(0) == doctest::Approx(0.05 / (1.0 + lam)).epsilon(1e-7));
    CHECK(g.theta.field.eval(0.0, a)(0) == doctest::Approx(-0.05 / (1.0 + lam)).epsilon(1e-7));
    CHECK(g.superposition_residual <= 1e-8);

    const Mat exact = oracle::eigenprojection(saddle() + swap(0.05), 1);
    const Mat Q = perturbed_projection_matrix(g.sigma.field, g.theta.field, 0.0);
    CHECK(op_norm(Q - exact) <= 1e-6);

    Vec u(2);
    u << 0.3, -0.7;
    const Vec pu = perturbed_projection(g.sigma.field, g.theta.field, 0.5, u);
    const Vec pau = perturbed_projection(g.sigma.field, g.theta.field, 0.5, (-1.5 * u).eval());
    CHECK((pau + 1.5 * pu).norm() <= 1e-10);

    PerturbedDichotomy pd = certify_perturbed(s.gen, s.cert, B, g);
    const oracle::Constants ref = oracle::constants(s.cert.M, s.cert.gamma, s.cert.rho, 0.05);
    CHECK(pd.kappa_ell == doctest::Approx(ref.kappa_minus).epsilon(1e-9));
    CHECK(pd.M_ell == doctest::Approx(ref.M_ell).epsilon(1e-9));
    CHECK(pd.gamma_ell == doctest::Approx(ref.gamma_ell).epsilon(1e-9));
    CHECK(pd.distance_bound == doctest::Approx(ref.distance_bound).epsilon(1e-9));
    CHECK(pd.M_ell == doctest::Approx(1.0859).epsilon(1e-3));
    CHECK(pd.gamma_ell == doctest::Approx(0.94865).epsilon(1e-4));
    CHECK(pd.distance_bound == doctest::Approx(0.0573).epsilon(2e-3));
    CHECK(pd.distance == doctest::Approx(0.025).epsilon(0.05));
    CHECK(pd.distance <= pd.distance_bound);
    CHECK(pd.idempotency <= 1e-10);
    CHECK(pd.report.pass);
    CHECK_FALSE(pd.thin_margin);
    CHECK(pd.pass);
  }

  TEST_CASE("near the perturbation bound the margin is flagged") {
    Setup s;
    const double ell = 0.99 * perturbation_bound(s.cert.gamma, s.cert.M, 0.0).bound;
    const Perturbation B = Perturbation::constant(swap(ell));
    LinearGraphs g = linear_graphs(s.gen, s.cert, B);
    PerturbedDichotomy pd = certify_perturbed(s.gen, s.cert, B, g);
    CHECK(pd.thin_margin);
    CHECK(pd.Q_ell_nodes.size() == 3);
    CHECK(op_norm(pd.Q_ell_nodes[1] - oracle::eigenprojection(saddle() + swap(ell), 1)) <= 1e-6);
  }

  TEST_CASE("oversized perturbations are rejected") {
    Setup s;
    CHECK_THROWS_AS(linear_graphs(s.gen, s.cert, Perturbation::constant(swap(0.4))), PreconditionFailure);
    Perturbation lie = Perturbation::constant(swap(0.1));
    lie.ell = 0.05;
    CHECK_THROWS_AS(linear_graphs(s.gen, s.cert, lie), InvalidArgument);
  }
}
