#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "invman/core/errors.hpp"
#include "invman/graph/cutoff.hpp"
#include "invman/graph/solver.hpp"
#include "invman/io/text.hpp"
#include "invman/roughness/roughness.hpp"

using namespace invman;

namespace {

Mat saddle() {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = -1.0;
  return A;
}

GraphField quadratic_graph() {
  const Generator gen = Generator::autonomous(saddle());
  const SplittingCertificate cert = estimate_splitting(gen, 1, TimeGrid(-1.0, 1.0, 2));
  const Nonlinearity f = cutoff(Nonlinearity{[](double, const Vec& u) {
                                               Vec out(2);
                                               out << 0.0, u(0) * u(0);
                                               return out;
                                             },
                                             1.0, true},
                                2, 0.15, 3.0)
                             .as_nonlinearity();
  const ConstantsLedger L = constants_ledger(cert.M, cert.gamma, cert.rho, f.lipschitz);
  return solve_sigma(gen, cert, f, L, GridSpec::uniform(1, 0.15, 7)).field;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("doubles round trip at 17 digits") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0, 5e-324}) {
      const std::string s = format_double(x);
      CHECK(parse_double(s) == x);
      CHECK(std::signbit(parse_double(s)) == std::signbit(x));
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::isinf(parse_double(format_double(-INFINITY))));
    CHECK(std::isnan(parse_double(format_double(NAN))));
    CHECK_THROWS_AS(parse_double("1.0x"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
  }

  TEST_CASE("tables") {
    Table t{{"tau", "r"}, {}};
    t.add({0.0, 1.0});
    t.add({-1.0, 0.36787944117144233});
    CHECK_THROWS_AS(t.add({1.0}), InvalidArgument);
    std::ostringstream os;
    write_table(os, t);
    CHECK(os.str() == "tau,r\n0,1\n-1,0.36787944117144233\n");
    std::istringstream is(os.str());
    const Table back = read_table(is);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    std::istringstream bad("a,b\n1,2\n3\n");
    try {
      read_table(bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("summary and ledger blocks") {
    Summary empty;
    CHECK(empty.pass());
    std::ostringstream os;
    write_summary(os, empty);
    CHECK(os.str().rfind("checks=0\nstatus=pass\n", 0) == 0);

    Summary s;
    s.checks.push_back(check_le("residual", 1e-6, 1e-4));
    s.checks.push_back(check_ge("rate", 0.8, 0.9));
    CHECK_FALSE(s.pass());
    CHECK(s.checks[0].margin() == doctest::Approx(1e-4 - 1e-6));
    CHECK(s.checks[1].margin() == doctest::Approx(-0.1));
    std::ostringstream o2;
    write_summary(o2, s);
    CHECK(o2.str().find("rate,>=,0.90000000000000002,0.80000000000000004,") != std::string::npos);

    const ConstantsLedger L = constants_ledger(1.0, 1.0, -1.0, 0.05);
    std::ostringstream o3;
    write_key_values(o3, ledger_block(L));
    const std::string text = o3.str();
    for (const char* key : {"gap_threshold=", "kappa_minus=", "delta=", "delta_hat="})
      CHECK(text.find(key) != std::string::npos);
    CHECK(text.find("gap_threshold=" + format_double(3.0 + 2.0 * std::sqrt(2.0))) != std::string::npos);
  }

  TEST_CASE("certificate round trip") {
    Mat A(3, 3);
    A << 1.0, 0.3, 0.0, 0.0, -0.5, 0.2, 0.1, 0.0, -2.0;
    const SplittingCertificate c = estimate_splitting(Generator::autonomous(A), 1, TimeGrid(0.0, 2.0, 4));
    std::ostringstream os;
    write_certificate(os, c);
    std::istringstream is(os.str());
    const SplittingCertificate back = read_certificate(is);
    CHECK(back.M == c.M);
    CHECK(back.gamma == c.gamma);
    CHECK(back.rho == c.rho);
    CHECK(back.rank == 1);
    CHECK(back.dim == 3);
    CHECK(back.exponents == c.exponents);
    CHECK(back.grid.n_nodes() == 5);
    for (int i = 0; i < 5; ++i) CHECK(back.projections[i] == c.projections[i]);
    std::ostringstream again;
    write_certificate(again, back);
    CHECK(again.str() == os.str());

    std::string broken = os.str();
    broken.replace(broken.find("rank=1"), 6, "rank=7");
    std::istringstream bad(broken);
    CHECK_THROWS_AS(read_certificate(bad), ParseError);
  }

  TEST_CASE("graph field round trip") {
    const GraphField g = quadratic_graph();
    std::ostringstream os;
    write_graph(os, g);
    const std::string text = os.str();
    CHECK(text.find("orientation=over_image") != std::string::npos);
    CHECK(text.find("ledger.kappa_chosen=") != std::string::npos);
    std::istringstream is(text);
    const GraphField back = read_graph(is);
    CHECK(back.values() == g.values());
    CHECK(back.kappa() == g.kappa());
    CHECK(back.provenance == g.provenance);
    Vec a(1);
    a << 0.037;
    CHECK(back.eval(0.3, a)(0) == g.eval(0.3, a)(0));
    std::ostringstream again;
    write_graph(again, back);
    CHECK(again.str() == text);
  }

  TEST_CASE("perturbed dichotomy round trip") {
    const Generator gen = Generator::autonomous(saddle());
    const SplittingCertificate cert = estimate_splitting(gen, 1, TimeGrid(-1.0, 1.0, 2));
    Mat B(2, 2);
    B << 0.0, 0.05, 0.05, 0.0;
    const Perturbation P = Perturbation::constant(B);
    const PerturbedDichotomy pd = certify_perturbed(gen, cert, P, linear_graphs(gen, cert, P));
    std::ostringstream os;
    write_perturbed(os, pd, 1);
    std::istringstream is(os.str());
    const PerturbedDichotomy back = read_perturbed(is);
    CHECK(back.M_ell == pd.M_ell);
    CHECK(back.gamma_ell == pd.gamma_ell);
    CHECK(back.distance_bound == pd.distance_bound);
    CHECK(back.pass == pd.pass);
    CHECK(back.Q_ell_nodes[1] == pd.Q_ell_nodes[1]);
  }

  TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "invman_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_file(dir / "out.txt", "x=1\n");
    CHECK(std::filesystem::file_size(dir / "out.txt") == 4);
    write_file(dir / "blocker", "");
    CHECK_THROWS_AS(write_file(dir / "blocker" / "child.txt", "y"), IoError);
    std::filesystem::remove_all(dir.parent_path());
  }
}
