#include "invman/io/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "invman/core/errors.hpp"

namespace invman {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end || s.empty()) throw ParseError("not a number: '" + s + "'", 0);
  return x;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_row(const std::string& line, int line_no) {
  std::vector<double> row;
  for (const std::string& f : split(line, ',')) {
    try {
      row.push_back(parse_double(f));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return row;
}

void write_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
  os << '\n';
}

void append(std::vector<double>& row, const Mat& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
}

Mat take(const std::vector<double>& row, std::size_t& pos, int rows, int cols) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = row.at(pos++);
  return m;
}

/// key=value header followed by named sections of comma-separated rows.
struct Document {
  std::map<std::string, std::string> header;
  std::vector<std::string> header_order;
  std::map<std::string, std::vector<std::vector<double>>> sections;
  std::map<std::string, int> section_line;

  static Document read(std::istream& is) {
    Document d;
    std::string line, section;
    int no = 0;
    while (std::getline(is, line)) {
      ++no;
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError("malformed section header", no);
        section = line.substr(1, line.size() - 2);
        d.sections[section];
        d.section_line[section] = no;
        continue;
      }
      if (section.empty()) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", no);
        const std::string key = line.substr(0, eq);
        if (d.header.count(key)) throw ParseError("duplicate key '" + key + "'", no);
        d.header[key] = line.substr(eq + 1);
        d.header_order.push_back(key);
      } else {
        d.sections[section].push_back(parse_row(line, no));
      }
    }
    return d;
  }

  const std::string& raw(const std::string& key) const {
    auto it = header.find(key);
    if (it == header.end()) throw ParseError("missing key '" + key + "'", 0);
    return it->second;
  }
  double num(const std::string& key) const { return parse_double(raw(key)); }
  int integer(const std::string& key) const {
    const double x = num(key);
    if (x != std::floor(x)) throw ParseError("key '" + key + "' must be an integer", 0);
    return static_cast<int>(x);
  }
  const std::vector<std::vector<double>>& rows(const std::string& name) const {
    auto it = sections.find(name);
    if (it == sections.end()) throw ParseError("missing section [" + name + "]", 0);
    return it->second;
  }
};

void kv(std::ostream& os, const std::string& k, double v) { os << k << '=' << format_double(v) << '\n'; }

void write_certificate_body(std::ostream& os, const SplittingCertificate& c) {
  kv(os, "M", c.M);
  kv(os, "gamma", c.gamma);
  kv(os, "rho", c.rho);
  os << "rank=" << c.rank << "\ndim=" << c.dim << "\nn_nodes=" << c.grid.n_nodes() << '\n';
  kv(os, "t_min", c.grid.t_min());
  kv(os, "t_max", c.grid.t_max());
  os << "exponents=";
  for (std::size_t i = 0; i < c.exponents.size(); ++i) os << (i ? "," : "") << format_double(c.exponents[i]);
  os << '\n';
  kv(os, "residual.idempotency", c.residuals.idempotency);
  kv(os, "residual.commutation", c.residuals.commutation);
  kv(os, "residual.forward_ratio", c.residuals.forward_ratio);
  kv(os, "residual.backward_ratio", c.residuals.backward_ratio);
}

void write_certificate_nodes(std::ostream& os, const SplittingCertificate& c) {
  os << "[nodes]\n";
  for (int i = 0; i < c.grid.n_nodes(); ++i) {
    std::vector<double> row{c.grid.node(i)};
    append(row, c.projections[i]);
    write_row(os, row);
  }
}

SplittingCertificate certificate_from(const Document& d) {
  SplittingCertificate c;
  const int n = d.integer("n_nodes");
  if (n < 2) throw ParseError("a certificate needs at least two nodes", 0);
  c.grid = TimeGrid(d.num("t_min"), d.num("t_max"), n - 1);
  c.M = d.num("M");
  c.gamma = d.num("gamma");
  c.rho = d.num("rho");
  c.rank = d.integer("rank");
  c.dim = d.integer("dim");
  if (c.dim < 1 || c.rank < 0 || c.rank > c.dim) throw ParseError("inconsistent rank and dimension", 0);
  const std::string& ex = d.raw("exponents");
  if (!ex.empty())
    for (const std::string& f : split(ex, ',')) c.exponents.push_back(parse_double(f));
  c.residuals.idempotency = d.num("residual.idempotency");
  c.residuals.commutation = d.num("residual.commutation");
  c.residuals.forward_ratio = d.num("residual.forward_ratio");
  c.residuals.backward_ratio = d.num("residual.backward_ratio");
  const auto& rows = d.rows("nodes");
  if (static_cast<int>(rows.size()) != n) throw ParseError("node count does not match n_nodes", d.section_line.at("nodes"));
  for (int i = 0; i < n; ++i) {
    const auto& r = rows[i];
    if (static_cast<int>(r.size()) != 1 + c.dim * c.dim)
      throw ParseError("node row has the wrong width", d.section_line.at("nodes") + 1 + i);
    std::size_t pos = 1;
    c.projections.push_back(take(r, pos, c.dim, c.dim));
  }
  return c;
}

}  // namespace

void Table::add(std::vector<double> row) {
  if (row.size() != header.size()) throw InvalidArgument("row width does not match the header");
  rows.push_back(std::move(row));
}

void write_table(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) write_row(os, r);
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  int no = 0;
  if (!std::getline(is, line)) throw ParseError("empty table", 0);
  ++no;
  t.header = split(line, ',');
  while (std::getline(is, line)) {
    ++no;
    if (line.empty()) continue;
    auto row = parse_row(line, no);
    if (row.size() != t.header.size()) throw ParseError("row width does not match the header", no);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_key_values(std::ostream& os, const KeyValues& kvs) {
  for (const auto& [k, v] : kvs) kv(os, k, v);
}

KeyValues ledger_block(const ConstantsLedger& ledger) { return ledger.entries(); }

double SummaryCheck::margin() const { return relation == "<=" ? bound - measured : measured - bound; }

SummaryCheck check_le(std::string name, double measured, double bound) {
  return SummaryCheck{std::move(name), "<=", bound, measured, measured <= bound};
}

SummaryCheck check_ge(std::string name, double measured, double bound) {
  return SummaryCheck{std::move(name), ">=", bound, measured, measured >= bound};
}

bool Summary::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void write_summary(std::ostream& os, const Summary& s) {
  os << "checks=" << s.checks.size() << "\nstatus=" << (s.pass() ? "pass" : "fail") << '\n';
  os << "name,relation,bound,measured,margin,status\n";
  for (const auto& c : s.checks)
    os << c.name << ',' << c.relation << ',' << format_double(c.bound) << ',' << format_double(c.measured) << ','
       << format_double(c.margin()) << ',' << (c.pass ? "pass" : "fail") << '\n';
}

void write_certificate(std::ostream& os, const SplittingCertificate& c) {
  os << "# splitting certificate\n";
  write_certificate_body(os, c);
  write_certificate_nodes(os, c);
}

SplittingCertificate read_certificate(std::istream& is) { return certificate_from(Document::read(is)); }

void write_graph(std::ostream& os, const GraphField& g) {
  const TimeGrid& tg = g.time_grid();
  const QGrid& q = g.q_grid();
  os << "# graph field\n";
  os << "orientation=" << to_string(g.orientation()) << '\n';
  os << "state_dim=" << g.state_dim() << "\nbase_dim=" << g.base_dim() << "\nvalue_dim=" << g.value_dim() << '\n';
  kv(os, "t_min", tg.t_min());
  kv(os, "t_max", tg.t_max());
  os << "n_steps=" << tg.n_steps() << '\n';
  for (int k = 0; k < q.dim(); ++k)
    os << "axis" << k << '=' << format_double(q.axis(k).lo) << ',' << format_double(q.axis(k).hi) << ','
       << q.axis(k).count << '\n';
  kv(os, "kappa", g.kappa());
  kv(os, "grid_slack", g.grid_slack());
  for (const auto& [k, v] : g.provenance) kv(os, "ledger." + k, v);
  os << "[frames]\n";
  for (int i = 0; i < tg.n_nodes(); ++i) {
    std::vector<double> row{tg.node(i)};
    append(row, g.frames().node(i).base);
    append(row, g.frames().node(i).value);
    write_row(os, row);
  }
  os << "[nodes]\n";
  for (int i = 0; i < tg.n_nodes(); ++i)
    for (int j = 0; j < q.size(); ++j) {
      std::vector<double> row{tg.node(i)};
      const Vec a = q.node(j);
      row.insert(row.end(), a.data(), a.data() + a.size());
      const Vec v = g.node_value(i, j);
      row.insert(row.end(), v.data(), v.data() + v.size());
      write_row(os, row);
    }
}

GraphField read_graph(std::istream& is) {
  const Document d = Document::read(is);
  const int n = d.integer("state_dim"), b = d.integer("base_dim"), v = d.integer("value_dim");
  if (b + v != n || b < 1 || v < 0) throw ParseError("inconsistent dimensions", 0);
  const TimeGrid tg(d.num("t_min"), d.num("t_max"), d.integer("n_steps"));
  std::vector<AxisSpec> axes;
  for (int k = 0; k < b; ++k) {
    const auto f = split(d.raw("axis" + std::to_string(k)), ',');
    if (f.size() != 3) throw ParseError("axis needs lo,hi,count", 0);
    axes.push_back(AxisSpec{parse_double(f[0]), parse_double(f[1]), static_cast<int>(parse_double(f[2]))});
  }
  const auto& frame_rows = d.rows("frames");
  if (static_cast<int>(frame_rows.size()) != tg.n_nodes()) throw ParseError("frame count mismatch", d.section_line.at("frames"));
  std::vector<SplitFrame> frames;
  for (const auto& r : frame_rows) {
    if (static_cast<int>(r.size()) != 1 + n * n) throw ParseError("frame row has the wrong width", 0);
    std::size_t pos = 1;
    SplitFrame f;
    f.base = take(r, pos, n, b);
    f.value = take(r, pos, n, v);
    frames.push_back(f);
  }
  const QGrid q(axes);
  const auto& rows = d.rows("nodes");
  if (static_cast<int>(rows.size()) != tg.n_nodes() * q.size()) throw ParseError("node count mismatch", d.section_line.at("nodes"));
  std::vector<double> values;
  values.reserve(rows.size() * v);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != 1 + b + v) throw ParseError("node row has the wrong width", 0);
    values.insert(values.end(), r.begin() + 1 + b, r.end());
  }
  GraphField g(SplitFrames(tg, std::move(frames), orientation_from_string(d.raw("orientation"))), q, d.num("kappa"),
               d.num("grid_slack"), std::move(values));
  for (const std::string& k : d.header_order)
    if (k.rfind("ledger.", 0) == 0) g.provenance.emplace_back(k.substr(7), d.num(k));
  return g;
}

void write_perturbed(std::ostream& os, const PerturbedDichotomy& p, int rank) {
  const SplittingCertificate c = p.as_certificate(rank);
  os << "# perturbed dichotomy\n";
  write_certificate_body(os, c);
  kv(os, "perturbed.ell", p.ell);
  kv(os, "perturbed.ell_bound", p.ell_bound);
  kv(os, "perturbed.M_ell", p.M_ell);
  kv(os, "perturbed.gamma_ell", p.gamma_ell);
  kv(os, "perturbed.kappa_ell", p.kappa_ell);
  kv(os, "perturbed.distance", p.distance);
  kv(os, "perturbed.distance_bound", p.distance_bound);
  kv(os, "perturbed.idempotency", p.idempotency);
  os << "perturbed.thin_margin=" << (p.thin_margin ? 1 : 0) << "\nperturbed.pass=" << (p.pass ? 1 : 0) << '\n';
  write_certificate_nodes(os, c);
}

PerturbedDichotomy read_perturbed(std::istream& is) {
  const Document d = Document::read(is);
  const SplittingCertificate c = certificate_from(d);
  PerturbedDichotomy p;
  p.grid = c.grid;
  p.Q_ell_nodes = c.projections;
  p.ell = d.num("perturbed.ell");
  p.ell_bound = d.num("perturbed.ell_bound");
  p.M_ell = d.num("perturbed.M_ell");
  p.gamma_ell = d.num("perturbed.gamma_ell");
  p.kappa_ell = d.num("perturbed.kappa_ell");
  p.distance = d.num("perturbed.distance");
  p.distance_bound = d.num("perturbed.distance_bound");
  p.idempotency = d.num("perturbed.idempotency");
  p.thin_margin = d.integer("perturbed.thin_margin") != 0;
  p.pass = d.integer("perturbed.pass") != 0;
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace invman
