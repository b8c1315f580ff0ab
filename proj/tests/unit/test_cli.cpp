#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "invman/cli/config.hpp"
#include "invman/cli/scenario.hpp"
#include "invman/core/errors.hpp"

using namespace invman;

namespace {

std::filesystem::path write_config(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "invman_cli_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

RunOptions dry() {
  RunOptions o;
  o.write = false;
  return o;
}

const SummaryCheck* find_check(const RunResult& r, const std::string& name) {
  for (const auto& c : r.summary.checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string artifact(const RunResult& r, const std::string& name) {
  for (const auto& [k, v] : r.artifacts)
    if (k == name) return v;
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    std::istringstream in(
        "# comment\n[a]\nx = 1.5   # trailing\ny=2\nname = hello\n\n[b]\nm = 1, 2; 3, 4\nl = 0.5, -1\n");
    Config c = Config::parse(in);
    CHECK(c.number("a", "x") == 1.5);
    CHECK(c.integer("a", "y") == 2);
    CHECK(c.text("a", "name") == "hello");
    const Mat m = c.matrix("b", "m");
    CHECK(m(1, 0) == 3.0);
    CHECK(c.list("b", "l", {}) == std::vector<double>{0.5, -1.0});
    CHECK(c.number("a", "missing", 7.0) == 7.0);
    CHECK_NOTHROW(c.finish());
    CHECK(c.resolved().back() == std::make_pair(std::string("a.missing"), std::string("7")));

    auto line_of = [](const std::string& text) {
      try {
        std::istringstream is(text);
        Config::parse(is);
      } catch (const ParseError& e) {
        return e.line();
      }
      return -1;
    };
    CHECK(line_of("[a]\nx = 1\nx = 2\n") == 3);
    CHECK(line_of("x = 1\n") == 1);
    CHECK(line_of("[a]\n\nnovalue\n") == 3);
    CHECK(line_of("[a\n") == 1);
    CHECK(line_of("[a]\nx =\n") == 2);

    std::istringstream extra("[a]\nx = 1\ntypo = 3\n");
    Config e = Config::parse(extra);
    e.number("a", "x");
    try {
      e.finish();
      FAIL("unknown key accepted");
    } catch (const ParseError& err) {
      CHECK(err.line() == 3);
    }

    std::istringstream bad("[a]\ntol = -1\nn = 2.5\nm = 1, 2; 3\n");
    Config b = Config::parse(bad);
    CHECK_THROWS_AS(b.positive("a", "tol", 1.0), ParseError);
    CHECK_THROWS_AS(b.integer("a", "n", 1), ParseError);
    CHECK_THROWS_AS(b.matrix("a", "m"), ParseError);
  }

  TEST_CASE("bundled scenarios are listed and present") {
    CHECK(bundled_scenarios().size() >= 9);
    for (const auto& name : bundled_scenarios()) CHECK(std::filesystem::exists(bundled_scenario(name)));
    CHECK(pipeline_names().size() == 8);
    CHECK_THROWS_AS(bundled_scenario("nope"), InvalidArgument);
  }

  TEST_CASE("quadratic manifold scenario") {
    const RunResult r = run_scenario(bundled_scenario("quadratic_manifold"), dry());
    CHECK(r.exit_code == exit_pass);
    CHECK(r.pipeline == "sigma");
    REQUIRE(find_check(r, "oracle_gap") != nullptr);
    CHECK(find_check(r, "oracle_gap")->measured <= 5e-3);
    const std::string manifest = artifact(r, "manifest.txt");
    CHECK(manifest.find("grid.count=61") != std::string::npos);
    CHECK(manifest.find("fixed_point.tol=1e-10") != std::string::npos);
    CHECK(manifest.find("constant.kappa_minus=") != std::string::npos);
    CHECK(artifact(r, "sigma.csv").rfind("t,a0,v0\n", 0) == 0);
  }

  TEST_CASE("roughness scenario") {
    const RunResult r = run_scenario(bundled_scenario("roughness_swap"), dry());
    CHECK(r.exit_code == exit_pass);
    REQUIRE(find_check(r, "oracle_projection") != nullptr);
    CHECK(find_check(r, "oracle_projection")->measured <= 1e-6);
    CHECK(artifact(r, "perturbed.txt").find("perturbed.M_ell=") != std::string::npos);
  }

  TEST_CASE("hyperbolic scenario and determinism") {
    const RunResult a = run_scenario(bundled_scenario("pde_hyperbolic"), dry());
    const RunResult b = run_scenario(bundled_scenario("pde_hyperbolic"), dry());
    CHECK(a.exit_code == exit_pass);
    CHECK(a.artifacts == b.artifacts);
  }

  TEST_CASE("error exits") {
    const auto neg = write_config("neg.cfg", "[scenario]\nname = n\npipeline = sigma\n[model]\nid = quadratic\n"
                                             "[splitting]\nrank = 1\n[grid]\nextent = 0.15\n[fixed_point]\ntol = -1e-9\n");
    RunResult r = run_scenario(neg, dry());
    CHECK(r.exit_code == exit_usage);
    CHECK(r.message.find("line 11") != std::string::npos);

    const auto unknown = write_config("unk.cfg", "[scenario]\nname = u\npipeline = splitting\n[model]\nid = linear\n"
                                                 "A = 1, 0; 0, -1\n[splitting]\nrank = 1\nwindw = 4\n");
    r = run_scenario(unknown, dry());
    CHECK(r.exit_code == exit_usage);
    CHECK(r.message.find("line 9") != std::string::npos);

    const auto pipe = write_config("pipe.cfg", "[scenario]\nname = p\npipeline = nonsense\n");
    CHECK(run_scenario(pipe, dry()).exit_code == exit_usage);
    CHECK(run_scenario("/nonexistent/file.cfg", dry()).exit_code == exit_usage);

    // Outside the parameter regime the E2 candidates collapse onto zero.
    const auto off = write_config("off.cfg", "[scenario]\nname = off\npipeline = pde-hyperbolic\n[limiting]\n"
                                             "beta0 = 1.6666666666666667\n[beta]\nshape = constant\nvalue = 1\n");
    r = run_scenario(off, dry());
    CHECK(r.exit_code == exit_failure);
    CHECK(r.message.find("pde-hyperbolic") != std::string::npos);
  }

  TEST_CASE("artifacts on disk") {
    const auto dir = std::filesystem::temp_directory_path() / "invman_cli_test" / "spectrum";
    std::filesystem::remove_all(dir);
    RunOptions o;
    o.out_dir = dir;
    const RunResult r = run_scenario(bundled_scenario("pde_spectrum"), o);
    CHECK(r.exit_code == exit_pass);
    for (const char* f : {"manifest.txt", "summary.txt", "eigenvalues.csv", "modes.csv"})
      CHECK(std::filesystem::exists(dir / f));
    std::ifstream ev(dir / "eigenvalues.csv");
    std::string header;
    std::getline(ev, header);
    CHECK(header == "k,lambda");
    std::filesystem::remove_all(dir);
  }
}
