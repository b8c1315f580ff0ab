#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "invman/core/graph_field.hpp"
#include "invman/dichotomy/splitting.hpp"
#include "invman/graph/constants.hpp"
#include "invman/roughness/roughness.hpp"

namespace invman {

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
/// Whole-string parse, accepting the output of format_double.
double parse_double(const std::string& s);

/// Comma-separated table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

void write_table(std::ostream& os, const Table& t);
Table read_table(std::istream& is);

using KeyValues = std::vector<std::pair<std::string, double>>;

void write_key_values(std::ostream& os, const KeyValues& kv);
KeyValues ledger_block(const ConstantsLedger& ledger);

/// One checked inequality: measured <relation> bound.
struct SummaryCheck {
  std::string name;
  std::string relation;  ///< "<=" or ">="
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;

  /// Signed slack, positive when the inequality holds.
  double margin() const;
};

SummaryCheck check_le(std::string name, double measured, double bound);
SummaryCheck check_ge(std::string name, double measured, double bound);

struct Summary {
  std::vector<SummaryCheck> checks;
  bool pass() const;
};

void write_summary(std::ostream& os, const Summary& s);

void write_certificate(std::ostream& os, const SplittingCertificate& c);
SplittingCertificate read_certificate(std::istream& is);

void write_graph(std::ostream& os, const GraphField& g);
GraphField read_graph(std::istream& is);

/// Certificate of Q_ell followed by a constants block.
void write_perturbed(std::ostream& os, const PerturbedDichotomy& p, int rank);
PerturbedDichotomy read_perturbed(std::istream& is);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace invman
