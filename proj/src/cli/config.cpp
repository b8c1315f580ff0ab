#include "invman/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "invman/core/errors.hpp"
#include "invman/io/text.hpp"

namespace invman {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

}  // namespace

Config Config::parse(std::istream& is) {
  Config c;
  std::string raw, section;
  int no = 0;
  while (std::getline(is, raw)) {
    ++no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", no);
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section)) throw ParseError("invalid section name '" + section + "'", no);
      c.sections_[section];
      continue;
    }
    if (section.empty()) throw ParseError("key outside of any section", no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(key)) throw ParseError("invalid key '" + key + "'", no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", no);
    auto& sec = c.sections_[section];
    if (sec.count(key)) throw ParseError("duplicate key '" + section + "." + key + "'", no);
    sec[key] = Entry{value, no};
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  return parse(in);
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void Config::record(const std::string& section, const std::string& key, const std::string& value) {
  const std::string name = section + "." + key;
  for (auto& [k, v] : resolved_)
    if (k == name) {
      v = value;
      return;
    }
  resolved_.emplace_back(name, value);
}

void Config::fail(const Entry& e, const std::string& section, const std::string& key, const std::string& what) const {
  throw ParseError(section + "." + key + ": " + what, e.line);
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) {
  const Entry* e = find(section, key);
  const std::string v = e ? e->value : fallback;
  if (e) e->used = true;
  record(section, key, v);
  return v;
}

std::string Config::text(const std::string& section, const std::string& key) {
  if (!find(section, key)) throw ParseError("missing required key " + section + "." + key, 0);
  return text(section, key, "");
}

double Config::number(const std::string& section, const std::string& key, double fallback) {
  const Entry* e = find(section, key);
  if (!e) {
    record(section, key, format_double(fallback));
    return fallback;
  }
  e->used = true;
  double x = 0.0;
  try {
    x = parse_double(e->value);
  } catch (const ParseError&) {
    fail(*e, section, key, "not a number: '" + e->value + "'");
  }
  if (!std::isfinite(x)) fail(*e, section, key, "must be finite");
  record(section, key, format_double(x));
  return x;
}

double Config::number(const std::string& section, const std::string& key) {
  if (!find(section, key)) throw ParseError("missing required key " + section + "." + key, 0);
  return number(section, key, 0.0);
}

double Config::positive(const std::string& section, const std::string& key, double fallback) {
  const double x = number(section, key, fallback);
  if (!(x > 0.0)) {
    const Entry* e = find(section, key);
    if (e) fail(*e, section, key, "must be strictly positive");
    throw InvalidArgument(section + "." + key + " default must be positive");
  }
  return x;
}

int Config::integer(const std::string& section, const std::string& key, int fallback) {
  const double x = number(section, key, fallback);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    const Entry* e = find(section, key);
    fail(*e, section, key, "must be an integer");
  }
  record(section, key, std::to_string(static_cast<int>(x)));
  return static_cast<int>(x);
}

int Config::integer(const std::string& section, const std::string& key) {
  if (!find(section, key)) throw ParseError("missing required key " + section + "." + key, 0);
  return integer(section, key, 0);
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) {
  const std::string v = text(section, key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(*find(section, key), section, key, "expected true or false");
}

Mat Config::matrix(const std::string& section, const std::string& key) {
  const std::string v = text(section, key);
  const Entry& e = *find(section, key);
  std::vector<std::vector<double>> rows;
  std::istringstream rs(v);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<double> r;
    std::istringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      try {
        r.push_back(parse_double(trim(cell)));
      } catch (const ParseError&) {
        fail(e, section, key, "bad matrix entry '" + trim(cell) + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  const std::size_t n = rows.size();
  if (n == 0) fail(e, section, key, "empty matrix");
  for (const auto& r : rows)
    if (r.size() != n) fail(e, section, key, "matrix must be square with rows separated by ';'");
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

std::vector<double> Config::list(const std::string& section, const std::string& key, std::vector<double> fallback) {
  const Entry* e = find(section, key);
  std::vector<double> out = std::move(fallback);
  if (e) {
    e->used = true;
    out.clear();
    std::istringstream cs(e->value);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      try {
        out.push_back(parse_double(trim(cell)));
      } catch (const ParseError&) {
        fail(*e, section, key, "bad list entry '" + trim(cell) + "'");
      }
    }
  }
  std::string joined;
  for (std::size_t i = 0; i < out.size(); ++i) joined += (i ? "," : "") + format_double(out[i]);
  record(section, key, joined);
  return out;
}

void Config::finish() const {
  const Entry* first = nullptr;
  std::string name;
  for (const auto& [s, keys] : sections_)
    for (const auto& [k, e] : keys)
      if (!e.used && (!first || e.line < first->line)) {
        first = &e;
        name = s + "." + k;
      }
  if (first) throw ParseError("unknown key " + name, first->line);
}

}  // namespace invman
