#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "invman/core/linalg.hpp"

namespace invman {

/// Sectioned key = value text. Every key must be consumed by a getter before
/// finish(), otherwise it is reported as unknown with its line number.
/// Getters record the resolved value (defaults included) for the manifest.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string text(const std::string& section, const std::string& key, const std::string& fallback);
  std::string text(const std::string& section, const std::string& key);
  double number(const std::string& section, const std::string& key, double fallback);
  double number(const std::string& section, const std::string& key);
  /// Strictly positive number (tolerances, steps, extents).
  double positive(const std::string& section, const std::string& key, double fallback);
  int integer(const std::string& section, const std::string& key, int fallback);
  int integer(const std::string& section, const std::string& key);
  bool flag(const std::string& section, const std::string& key, bool fallback);
  /// Rows separated by ';', entries by ','.
  Mat matrix(const std::string& section, const std::string& key);
  std::vector<double> list(const std::string& section, const std::string& key, std::vector<double> fallback);

  /// Throws ParseError for the first key no getter asked for.
  void finish() const;

  /// section.key = value in resolution order.
  const std::vector<std::pair<std::string, std::string>>& resolved() const { return resolved_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  void record(const std::string& section, const std::string& key, const std::string& value);
  [[noreturn]] void fail(const Entry& e, const std::string& section, const std::string& key,
                         const std::string& what) const;

  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::vector<std::pair<std::string, std::string>> resolved_;
};

}  // namespace invman
