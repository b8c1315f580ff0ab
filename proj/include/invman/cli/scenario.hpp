#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "invman/io/text.hpp"

namespace invman {

struct RunOptions {
  std::filesystem::path out_dir;  ///< defaults to out/<scenario name>
  int threads = 1;
  bool write = true;  ///< false skips all file output
};

enum ExitCode { exit_pass = 0, exit_failure = 1, exit_usage = 2 };

struct RunResult {
  int exit_code = exit_pass;
  std::string name;
  std::string pipeline;
  std::string message;  ///< error text when the run did not complete
  Summary summary;
  /// Output file name -> content, in write order.
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::filesystem::path out_dir;
};

const std::vector<std::string>& pipeline_names();

/// Directory holding the bundled *.cfg files.
std::filesystem::path scenario_dir();
/// Bundled scenario names in their documented order.
const std::vector<std::string>& bundled_scenarios();
std::filesystem::path bundled_scenario(const std::string& name);

RunResult run_scenario(const std::filesystem::path& config, const RunOptions& opts = {});

}  // namespace invman
