#include <CLI11.hpp>

#include <iostream>

#include "invman/cli/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Invariant manifolds and dichotomies for non-autonomous systems"};
  std::string config, out;
  int threads = 1;
  bool list = false;
  app.add_option("--config", config, "scenario file (key = value sections)");
  app.add_option("--out", out, "output directory (default out/<scenario>)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--list-scenarios", list, "print bundled scenarios and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : invman::exit_usage;
  }

  if (list) {
    for (const auto& name : invman::bundled_scenarios())
      std::cout << name << "  " << invman::bundled_scenario(name).string() << '\n';
    return 0;
  }
  if (config.empty()) {
    std::cerr << "--config is required\n" << app.help();
    return invman::exit_usage;
  }

  invman::RunOptions opts;
  opts.out_dir = out;
  opts.threads = threads;
  const invman::RunResult r = invman::run_scenario(config, opts);
  if (!r.message.empty()) std::cerr << "error: " << r.message << '\n';
  int failed = 0;
  for (const auto& c : r.summary.checks) failed += c.pass ? 0 : 1;
  if (r.exit_code != invman::exit_usage) {
    std::cout << r.name << " (" << r.pipeline << "): " << r.summary.checks.size() << " checks, " << failed
              << " failed -> " << r.out_dir.string() << '\n';
    for (const auto& c : r.summary.checks)
      if (!c.pass)
        std::cout << "  FAIL " << c.name << ": " << invman::format_double(c.measured) << ' ' << c.relation << ' '
                  << invman::format_double(c.bound) << '\n';
  }
  return r.exit_code;
}
