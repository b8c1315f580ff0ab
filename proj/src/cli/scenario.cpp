#include "invman/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "invman/cli/config.hpp"
#include "invman/core/errors.hpp"
#include "invman/fine/nested.hpp"
#include "invman/graph/cutoff.hpp"
#include "invman/graph/rates.hpp"
#include "invman/graph/solver.hpp"
#include "invman/pde/diffusion.hpp"
#include "invman/pde/hyperbolic.hpp"
#include "invman/pde/reduced.hpp"
#include "invman/pde/spectrum.hpp"
#include "invman/roughness/roughness.hpp"

#ifndef INVMAN_SCENARIO_DIR
#define INVMAN_SCENARIO_DIR "scenarios"
#endif

namespace invman {

namespace {

struct Output {
  Summary summary;
  std::vector<std::pair<std::string, std::string>> files;
  KeyValues constants;

  void add(SummaryCheck c) { summary.checks.push_back(std::move(c)); }
  void holds(const std::string& name, bool ok) { add(check_ge(name, ok ? 1.0 : 0.0, 1.0)); }
  void file(const std::string& name, const std::string& content) { files.emplace_back(name, content); }
  void ledger(const std::string& prefix, const ConstantsLedger& L) {
    for (const auto& [k, v] : L.entries()) constants.emplace_back(prefix + k, v);
  }
};

using Pipeline = std::function<void(Config&, const RunOptions&, Output&)>;

// ---- models ---------------------------------------------------------------

struct Model {
  std::string id;
  Generator gen;
  Nonlinearity raw;
  int dim = 0;
};

Nonlinearity polynomial(int dim, std::function<Vec(const Vec&)> g) {
  return Nonlinearity{[dim, g](double, const Vec& u) {
                        Vec out = g(u);
                        return out.size() == dim ? out : Vec(Vec::Zero(dim));
                      },
                      1.0, true};
}

Model read_model(Config& cfg) {
  Model m{cfg.text("model", "id"), Generator::autonomous(Mat::Identity(1, 1)), zero_nonlinearity(1), 0};
  if (m.id == "linear") {
    const Mat A = cfg.matrix("model", "A");
    m.gen = Generator::autonomous(A);
    m.dim = static_cast<int>(A.rows());
    m.raw = zero_nonlinearity(m.dim);
  } else if (m.id == "quadratic" || m.id == "quadratic_mirror") {
    const bool mirror = m.id == "quadratic_mirror";
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = -1.0;
    m.gen = Generator::autonomous(A);
    m.dim = 2;
    m.raw = polynomial(2, [mirror](const Vec& u) {
      Vec out(2);
      if (mirror)
        out << u(1) * u(1), 0.0;
      else
        out << 0.0, u(0) * u(0);
      return out;
    });
  } else if (m.id == "periodic_quadratic") {
    const double amp = cfg.number("model", "amplitude", 0.2);
    const double freq = cfg.positive("model", "frequency", 1.0);
    if (!(std::abs(amp) < 0.5)) throw ParseError("model.amplitude must lie in (-0.5, 0.5)", 0);
    m.gen = Generator(2, [amp, freq](double t) {
      Mat A = Mat::Zero(2, 2);
      A(0, 0) = 1.0 + amp * std::sin(freq * t);
      A(1, 1) = -1.0;
      return A;
    });
    m.dim = 2;
    m.raw = polynomial(2, [](const Vec& u) {
      Vec out(2);
      out << 0.0, u(0) * u(0);
      return out;
    });
  } else if (m.id == "cubic3") {
    const double eps = cfg.number("model", "epsilon", 0.01);
    m.gen = Generator::autonomous(Eigen::Vector3d(2.0, 1.0, -1.0).asDiagonal());
    m.dim = 3;
    m.raw = polynomial(3, [eps](const Vec& u) {
      Vec out = Vec::Zero(3);
      out(2) = eps * u(0) * u(0) * u(0);
      return out;
    });
  } else {
    throw ParseError("unknown model.id '" + m.id + "'", 0);
  }
  return m;
}

Nonlinearity read_cutoff(Config& cfg, const Model& m, const TimeGrid& times) {
  const double radius = cfg.positive("model", "cutoff_radius", 0.15);
  const double ramp = cfg.positive("model", "cutoff_ramp", 3.0);
  if (m.id == "linear") return zero_nonlinearity(m.dim);
  CutoffOptions co;
  co.sample_times = {times.t_min(), 0.5 * (times.t_min() + times.t_max()), times.t_max()};
  return cutoff(m.raw, m.dim, radius, ramp, co).as_nonlinearity();
}

struct SplitParams {
  int rank = 1;
  TimeGrid grid{-1.0, 1.0, 2};
  SplittingOptions opts;
  int samples = 64;
  VerifyOptions verify;
};

SplitParams read_splitting(Config& cfg, const std::string& section = "splitting", int default_rank = -1) {
  SplitParams p;
  p.rank = default_rank >= 0 ? cfg.integer(section, "rank", default_rank) : cfg.integer(section, "rank");
  const double lo = cfg.number(section, "t_min", -1.0), hi = cfg.number(section, "t_max", 1.0);
  const int steps = cfg.integer(section, "steps", 2);
  if (!(hi > lo) || steps < 1) throw ParseError(section + ": need t_max > t_min and steps >= 1", 0);
  p.grid = TimeGrid(lo, hi, steps);
  p.opts.window = cfg.positive(section, "window", 5.0);
  p.opts.step = cfg.positive(section, "step", 1e-2);
  p.samples = cfg.integer(section, "verify_samples", 64);
  p.verify.tol = cfg.positive(section, "verify_tol", 1e-6);
  return p;
}

GridSpec read_grid(Config& cfg, int dim, const RunOptions& run, const std::string& section = "grid") {
  const double extent = cfg.positive(section, "extent", 0.15);
  const int count = cfg.integer(section, "count", 21);
  if (count < 2) throw ParseError(section + ".count must be at least 2", 0);
  GridSpec g = GridSpec::uniform(dim, extent, count, cfg.positive(section, "step", 0.02));
  g.grid_slack = cfg.positive(section, "grid_slack", 0.05);
  g.tol_tail = cfg.positive(section, "tol_tail", 1e-8);
  g.threads = std::max(1, run.threads);
  return g;
}

FixedPointOptions read_fixed_point(Config& cfg) {
  FixedPointOptions o;
  o.tol_fp = cfg.positive("fixed_point", "tol", 1e-10);
  o.max_iterations = cfg.integer("fixed_point", "max_iterations", 100);
  if (cfg.has("fixed_point", "horizon")) o.horizon = cfg.positive("fixed_point", "horizon", 1.0);
  return o;
}

struct GraphChecks {
  int steps = 5;
  double flight_step = 0.02;
  double invariance_tol = 1e-4;
  double lipschitz_factor = 1.05;
};

GraphChecks read_graph_checks(Config& cfg) {
  GraphChecks c;
  c.steps = cfg.integer("checks", "invariance_steps", 5);
  c.flight_step = cfg.positive("checks", "flight_step", 0.02);
  c.invariance_tol = cfg.positive("checks", "invariance_tol", 1e-4);
  c.lipschitz_factor = cfg.positive("checks", "lipschitz_factor", 1.05);
  return c;
}

std::string render_graph_table(const GraphField& g) {
  Table t;
  t.header.push_back("t");
  for (int k = 0; k < g.base_dim(); ++k) t.header.push_back("a" + std::to_string(k));
  for (int k = 0; k < g.value_dim(); ++k) t.header.push_back("v" + std::to_string(k));
  for (int i = 0; i < g.time_grid().n_nodes(); ++i)
    for (int j = 0; j < g.q_grid().size(); ++j) {
      std::vector<double> row{g.time_grid().node(i)};
      const Vec a = g.q_grid().node(j), v = g.node_value(i, j);
      row.insert(row.end(), a.data(), a.data() + a.size());
      row.insert(row.end(), v.data(), v.data() + v.size());
      t.rows.push_back(std::move(row));
    }
  std::ostringstream os;
  write_table(os, t);
  return os.str();
}

std::string render(const std::function<void(std::ostream&)>& w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

void graph_checks(Output& out, const std::string& prefix, const GraphSolution& s, const Generator& gen,
                  const Nonlinearity& f, const ConstantsLedger& L, const GraphChecks& c) {
  const InvarianceReport inv = graph_invariance(s.field, gen, f, c.steps, c.flight_step);
  out.add(check_le(prefix + "invariance_residual", inv.max_residual, c.invariance_tol));
  out.add(check_le(prefix + "lipschitz", s.field.lipschitz_estimate(), L.kappa_chosen * c.lipschitz_factor));
  out.add(check_le(prefix + "zero_section", s.field.zero_section_residual(), 0.0));
  out.constants.emplace_back(prefix + "iterations", s.stats.iterations);
}

/// max over nodes with |a| <= radius at the middle time of |v - oracle(a)|.
double oracle_gap(const GraphField& g, double radius, const std::function<double(double)>& oracle) {
  const int mid = g.time_grid().n_nodes() / 2;
  double worst = 0.0;
  for (int j = 0; j < g.q_grid().size(); ++j) {
    const double a = g.q_grid().node(j)(0);
    if (std::abs(a) > radius + 1e-12) continue;
    worst = std::max(worst, std::abs(g.node_value(mid, j)(0) - oracle(a)));
  }
  return worst;
}

std::vector<RateSample> read_rate_samples(Config& cfg, const std::string& key, std::vector<double> fallback) {
  std::vector<RateSample> out;
  for (double x : cfg.list("rates", key, std::move(fallback))) {
    Vec a(1);
    a << x;
    out.push_back({0.0, a});
  }
  return out;
}

void add_rates(Output& out, const std::string& prefix, const RatesReport& r) {
  for (const RateCheck& c : r.checks) {
    SummaryCheck s{prefix + c.name, c.relation, c.bound, c.measured, c.pass};
    out.add(s);
  }
}

// ---- pipelines ------------------------------------------------------------

void pipeline_splitting(Config& cfg, const RunOptions&, Output& out) {
  const Model m = read_model(cfg);
  const SplitParams sp = read_splitting(cfg);
  cfg.finish();
  const SplittingCertificate c = estimate_splitting(m.gen, sp.rank, sp.grid, sp.opts);
  const SplittingReport r = verify_splitting(m.gen, c, sp.samples, sp.verify);
  out.add(check_le("forward_ratio", r.worst_forward, 1.0 + r.tol));
  out.add(check_le("backward_ratio", r.worst_backward, 1.0 + r.tol));
  out.add(check_le("commutation", r.commutation, r.tol));
  out.add(check_le("idempotency", r.idempotency, r.tol));
  out.constants = {{"M", c.M}, {"gamma", c.gamma}, {"rho", c.rho}};
  out.file("certificate.txt", render([&](std::ostream& os) { write_certificate(os, c); }));
  Table t{{"k", "exponent"}, {}};
  for (std::size_t k = 0; k < c.exponents.size(); ++k) t.add({static_cast<double>(k), c.exponents[k]});
  out.file("exponents.csv", render([&](std::ostream& os) { write_table(os, t); }));
}

void pipeline_graph(Config& cfg, const RunOptions& run, Output& out, bool sigma) {
  const Model m = read_model(cfg);
  const SplitParams sp = read_splitting(cfg, "splitting", 1);
  const GridSpec grid = read_grid(cfg, sigma ? sp.rank : m.dim - sp.rank, run);
  const FixedPointOptions fp = read_fixed_point(cfg);
  const GraphChecks gc = read_graph_checks(cfg);
  const double oracle_radius = cfg.positive("checks", "oracle_radius", 0.05);
  const double oracle_tol = cfg.positive("checks", "oracle_tol", 5e-3);
  const double zero_tol = cfg.positive("checks", "zero_graph_tol", 1e-6);
  const bool rates = cfg.flag("rates", "enabled", false);
  RateOptions ro;
  std::vector<RateSample> samples;
  if (rates) {
    ro.horizon = cfg.positive("rates", "horizon", 4.0);
    ro.tol = cfg.positive("rates", "tol", 0.05);
    samples = read_rate_samples(cfg, "samples", {0.005, -0.004, 0.002});
  }
  const Nonlinearity f = read_cutoff(cfg, m, sp.grid);
  cfg.finish();

  const SplittingCertificate cert = estimate_splitting(m.gen, sp.rank, sp.grid, sp.opts);
  const ConstantsLedger L = constants_ledger(cert.M, cert.gamma, cert.rho, f.lipschitz);
  out.ledger("", L);
  const GraphSolution s = sigma ? solve_sigma(m.gen, cert, f, L, grid, fp) : solve_theta(m.gen, cert, f, L, grid, fp);
  graph_checks(out, "", s, m.gen, f, L, gc);

  const bool quad = m.id == "quadratic" || m.id == "periodic_quadratic" || m.id == "quadratic_mirror";
  if (quad && m.id != "periodic_quadratic") {
    const bool curved = (m.id == "quadratic") == sigma;
    if (curved) {
      const double sgn = m.id == "quadratic" ? 1.0 : -1.0;
      out.add(check_le("oracle_gap", oracle_gap(s.field, oracle_radius, [sgn](double x) { return sgn * x * x / 3.0; }),
                       oracle_tol));
    } else {
      out.add(check_le("oracle_zero", oracle_gap(s.field, 1e300, [](double) { return 0.0; }), zero_tol));
    }
  }
  if (rates) add_rates(out, "rates.", verify_rates(s.field, m.gen, f, L, samples, ro));
  out.file(sigma ? "sigma.txt" : "theta.txt", render([&](std::ostream& os) { write_graph(os, s.field); }));
  out.file(sigma ? "sigma.csv" : "theta.csv", render_graph_table(s.field));
}

void pipeline_saddle(Config& cfg, const RunOptions& run, Output& out) {
  const Model m = read_model(cfg);
  const SplitParams sp = read_splitting(cfg, "splitting", 1);
  const GridSpec ug = read_grid(cfg, sp.rank, run);
  const GridSpec sg = read_grid(cfg, m.dim - sp.rank, run, cfg.has("stable_grid", "extent") ? "stable_grid" : "grid");
  const FixedPointOptions fp = read_fixed_point(cfg);
  const GraphChecks gc = read_graph_checks(cfg);
  const bool rates = cfg.flag("rates", "enabled", true);
  RateOptions ro;
  std::vector<RateSample> us, ss;
  if (rates) {
    ro.horizon = cfg.positive("rates", "horizon", 3.0);
    ro.tol = cfg.positive("rates", "tol", 0.05);
    us = read_rate_samples(cfg, "samples", {0.005, -0.004, 0.002});
    ss = read_rate_samples(cfg, "stable_samples", {0.1, -0.08});
  }
  const Nonlinearity f = read_cutoff(cfg, m, sp.grid);
  cfg.finish();

  const SplittingCertificate cert = estimate_splitting(m.gen, sp.rank, sp.grid, sp.opts);
  const ConstantsLedger L = constants_ledger(cert.M, cert.gamma, cert.rho, f.lipschitz);
  out.ledger("", L);
  const SaddlePair pair = saddle_point(m.gen, cert, f, L, ug, sg, fp);
  graph_checks(out, "unstable.", pair.unstable, m.gen, f, L, gc);
  graph_checks(out, "stable.", pair.stable, m.gen, f, L, gc);
  if (rates) {
    add_rates(out, "rates.unstable.", verify_rates(pair.unstable.field, m.gen, f, L, us, ro));
    add_rates(out, "rates.stable.", verify_rates(pair.stable.field, m.gen, f, L, ss, ro));
  }
  out.file("unstable.txt", render([&](std::ostream& os) { write_graph(os, pair.unstable.field); }));
  out.file("stable.txt", render([&](std::ostream& os) { write_graph(os, pair.stable.field); }));
  out.file("unstable.csv", render_graph_table(pair.unstable.field));
  out.file("stable.csv", render_graph_table(pair.stable.field));
}

Mat eigenprojection(const Mat& a, int rank) {
  Eigen::EigenSolver<Mat> es(a);
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<int> order(ev.size());
  for (int i = 0; i < ev.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return ev(i).real() > ev(j).real(); });
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::MatrixXcd W = V.inverse();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
  for (int k = 0; k < rank; ++k) P += V.col(order[k]) * W.row(order[k]);
  return P.real();
}

void pipeline_roughness(Config& cfg, const RunOptions& run, Output& out) {
  const Model m = read_model(cfg);
  if (m.id != "linear") throw ParseError("roughness needs model.id = linear", 0);
  const SplitParams sp = read_splitting(cfg);
  const Mat B = cfg.matrix("roughness", "B");
  RoughnessOptions ro;
  ro.extent = cfg.positive("roughness", "extent", 2.0);
  ro.count = cfg.integer("roughness", "count", 5);
  ro.step = cfg.positive("roughness", "step", 1e-2);
  ro.threads = std::max(1, run.threads);
  const double oracle_tol = cfg.positive("checks", "oracle_tol", 1e-6);
  const GraphChecks gc = read_graph_checks(cfg);
  cfg.finish();
  if (B.rows() != m.dim) throw ParseError("roughness.B must match the model dimension", 0);

  const SplittingCertificate cert = estimate_splitting(m.gen, sp.rank, sp.grid, sp.opts);
  const Perturbation P = Perturbation::constant(B);
  const PerturbationBound pb = perturbation_bound(cert.gamma, cert.M, P.ell);
  out.add(check_le("perturbation_size", P.ell, pb.bound));
  const LinearGraphs g = linear_graphs(m.gen, cert, P, ro);
  out.ledger("", g.ledger);
  const PerturbedDichotomy pd = certify_perturbed(m.gen, cert, P, g, sp.samples, sp.verify);
  const Generator perturbed = m.gen.perturbed(B);
  const Nonlinearity none = zero_nonlinearity(m.dim);
  graph_checks(out, "sigma.", g.sigma, perturbed, none, g.ledger, gc);
  graph_checks(out, "theta.", g.theta, perturbed, none, g.ledger, gc);
  out.add(check_le("superposition", g.superposition_residual, 1e-8));
  out.add(check_le("distance", pd.distance, pd.distance_bound));
  out.add(check_le("idempotency", pd.idempotency, sp.verify.tol));
  out.add(check_le("forward_ratio", pd.report.worst_forward, 1.0 + pd.report.tol));
  out.add(check_le("backward_ratio", pd.report.worst_backward, 1.0 + pd.report.tol));
  out.add(check_le("commutation", pd.report.commutation, pd.report.tol));
  if (m.gen.is_autonomous()) {
    const Mat exact = eigenprojection(m.gen.linear(0.0) + B, sp.rank);
    double worst = 0.0;
    for (const Mat& q : pd.Q_ell_nodes) worst = std::max(worst, op_norm(q - exact));
    out.add(check_le("oracle_projection", worst, oracle_tol));
  }
  out.constants.emplace_back("M_ell", pd.M_ell);
  out.constants.emplace_back("gamma_ell", pd.gamma_ell);
  out.constants.emplace_back("distance_bound", pd.distance_bound);
  out.constants.emplace_back("thin_margin", pd.thin_margin ? 1.0 : 0.0);
  out.file("perturbed.txt", render([&](std::ostream& os) { write_perturbed(os, pd, sp.rank); }));
}

void pipeline_fine(Config& cfg, const RunOptions& run, Output& out) {
  const Model m = read_model(cfg);
  if (m.dim != 3) throw ParseError("fine-structure needs a three-dimensional model", 0);
  const SplitParams coarse = read_splitting(cfg, "splitting", 2);
  const int fine_rank = cfg.integer("fine", "fine_rank", 1);
  const double extent = cfg.positive("fine", "extent", 0.6);
  const int coarse_count = cfg.integer("fine", "coarse_count", 13);
  const int line_count = cfg.integer("fine", "line_count", 25);
  const double step = cfg.positive("fine", "step", 0.02);
  const std::vector<double> start = cfg.list("fine", "start", {0.4, 0.4});
  const double t0 = cfg.number("fine", "t", 0.0);
  const std::vector<double> taus = cfg.list("fine", "taus", {-0.5, -1.0, -1.5, -2.0, -2.5, -3.0, -3.5, -4.0});
  const double rate_factor = cfg.positive("checks", "rate_factor", 0.9);
  const double containment_tol = cfg.positive("checks", "containment_tol", 1e-4);
  const double coefficient_rtol = cfg.positive("checks", "coefficient_rtol", 0.1);
  const double epsilon = m.id == "cubic3" ? cfg.number("model", "epsilon", 0.01) : 0.0;
  const GraphChecks gc = read_graph_checks(cfg);
  NestedOptions no;
  no.coarse_grid = GridSpec::uniform(2, extent, coarse_count, step);
  no.fast_grid = GridSpec::uniform(1, extent, line_count, step);
  no.slow_grid = GridSpec::uniform(1, extent, line_count, step);
  for (GridSpec* g : {&no.coarse_grid, &no.fast_grid, &no.slow_grid}) g->threads = std::max(1, run.threads);
  no.fixed_point = read_fixed_point(cfg);
  const Nonlinearity f = read_cutoff(cfg, m, coarse.grid);
  cfg.finish();
  if (start.size() != 2) throw ParseError("fine.start needs two coarse base coordinates", 0);

  const SplittingCertificate cc = estimate_splitting(m.gen, coarse.rank, coarse.grid, coarse.opts);
  const SplittingCertificate fc = estimate_splitting(m.gen, fine_rank, coarse.grid, coarse.opts);
  const NestedManifolds n = build_nested(m.gen, cc, fc, f, no);
  out.ledger("coarse.", n.coarse_ledger);
  out.ledger("fine.", n.fine_ledger);
  out.constants.emplace_back("delta_bar", n.delta_bar);
  graph_checks(out, "coarse.", n.coarse, m.gen, f, n.coarse_ledger, gc);
  graph_checks(out, "fast.", n.fast, m.gen, f, n.fine_ledger, gc);
  out.add(check_le("containment", n.containment, containment_tol));
  if (m.id == "cubic3" && epsilon != 0.0) {
    double worst = 0.0;
    for (double x : {0.3, 0.45, 0.6, -0.5}) {
      if (std::abs(x) > extent) continue;
      Vec a(1);
      a << x;
      const double c = n.fast.field.lift(t0, a, Extent::clamp)(2) / (x * x * x);
      worst = std::max(worst, std::abs(c - epsilon / 7.0) / (epsilon / 7.0));
    }
    out.add(check_le("fast_coefficient_rel_error", worst, coefficient_rtol));
  }
  Vec a(2);
  a << start[0], start[1];
  const Vec u0 = n.coarse.field.lift(t0, a, Extent::clamp);
  const RatioSamples r = tangency_ratio(n, u0, t0, taus);
  out.add(check_ge("ratio_rate", r.fitted_rate, rate_factor * n.delta_bar));
  out.holds("ratio_bound", r.bound_holds);
  Table t{{"tau", "r"}, {}};
  for (std::size_t k = 0; k < r.taus.size(); ++k) t.add({r.taus[k], r.ratios[k]});
  out.file("ratio.csv", render([&](std::ostream& os) { write_table(os, t); }));
  Table ang{{"tau", "angle"}, {}};
  for (std::size_t k = 0; k < r.taus.size(); ++k) ang.add({r.taus[k], r.angles[k]});
  out.file("angle.csv", render([&](std::ostream& os) { write_table(os, ang); }));
  out.file("fast.txt", render([&](std::ostream& os) { write_graph(os, n.fast.field); }));
}

DiffusionParams read_diffusion(Config& cfg) {
  DiffusionParams p;
  p.shape = profile_shape_from_string(cfg.text("diffusion", "shape", "localized"));
  if (p.shape == ProfileShape::constant) {
    p.constant_value = cfg.positive("diffusion", "value", 1.0);
  } else {
    p.nu = cfg.positive("diffusion", "nu", 1e-3);
    p.x_star = cfg.positive("diffusion", "x_star", 0.5);
    p.alpha0 = cfg.positive("diffusion", "alpha0", 1.0);
    p.beta0 = cfg.positive("diffusion", "beta0", 2.4);
  }
  return p;
}

void pipeline_spectrum(Config& cfg, const RunOptions&, Output& out) {
  const DiffusionParams dp = read_diffusion(cfg);
  EigenOptions eo;
  eo.mesh.points = cfg.integer("mesh", "points", 512);
  eo.mesh.valley_points = cfg.integer("mesh", "valley_points", 128);
  const int modes = cfg.integer("spectrum", "modes", 4);
  const double ratio_min = cfg.positive("spectrum", "ratio_min", 10.0);
  const double orth_tol = cfg.positive("checks", "orthonormality_tol", 1e-8);
  const double control_rtol = cfg.positive("checks", "control_rtol", 5e-3);
  const bool reference = cfg.has("spectrum", "lambda2_reference");
  const double ref = reference ? cfg.positive("spectrum", "lambda2_reference", 1.0) : 0.0;
  const double ref_rtol = reference ? cfg.positive("spectrum", "lambda2_rtol", 0.1) : 0.0;
  cfg.finish();
  if (modes < 3) throw ParseError("spectrum.modes must be at least 3", 0);

  const DiffusionProfile profile = build_diffusion(dp);
  const Spectrum s = eigensolve(profile, modes, eo);
  out.add(check_le("lambda1", std::abs(s.lambdas[0]), 1e-10));
  out.add(check_le("orthonormality", s.orthonormality, orth_tol));
  out.add(check_le("residual", s.residual, eo.residual_tol));
  if (dp.shape == ProfileShape::localized) {
    out.holds("bands", profile.check_bands(s.disc.x).pass);
    out.add(check_ge("lambda3_over_lambda2", s.lambdas[2] / s.lambdas[1], ratio_min));
  } else {
    const double exact = dp.constant_value * M_PI * M_PI;
    out.add(check_le("control_rel_error", std::abs(s.lambdas[1] - exact) / exact, control_rtol));
  }
  if (reference) out.add(check_le("lambda2_rel_error", std::abs(s.lambdas[1] - ref) / ref, ref_rtol));
  for (int k = 0; k < modes; ++k) out.constants.emplace_back("lambda" + std::to_string(k + 1), s.lambdas[k]);

  Table ev{{"k", "lambda"}, {}};
  for (int k = 0; k < modes; ++k) ev.add({static_cast<double>(k + 1), s.lambdas[k]});
  out.file("eigenvalues.csv", render([&](std::ostream& os) { write_table(os, ev); }));
  Table md;
  md.header = {"x", "a"};
  for (int k = 0; k < modes; ++k) md.header.push_back("phi" + std::to_string(k + 1));
  for (int i = 0; i < s.disc.size(); ++i) {
    std::vector<double> row{s.disc.x[i], profile(s.disc.x[i])};
    for (int k = 0; k < modes; ++k) row.push_back(s.phis[k](i));
    md.add(std::move(row));
  }
  out.file("modes.csv", render([&](std::ostream& os) { write_table(os, md); }));
}

BetaFunction read_beta(Config& cfg) {
  const std::string shape = cfg.text("beta", "shape", "sinusoid");
  if (shape == "constant") return BetaFunction::constant(cfg.positive("beta", "value", 1.0));
  if (shape == "sinusoid")
    return BetaFunction::sinusoid(cfg.positive("beta", "mean", 1.5), cfg.number("beta", "amplitude", 0.5),
                                  cfg.positive("beta", "frequency", 1.0));
  throw ParseError("beta.shape must be constant or sinusoid", 0);
}

void pipeline_hyperbolic(Config& cfg, const RunOptions&, Output& out) {
  const double xs = cfg.positive("limiting", "x_star", 0.5);
  const double a0 = cfg.positive("limiting", "alpha0", 1.0);
  const double b0 = cfg.positive("limiting", "beta0", 2.4);
  const BetaFunction beta = read_beta(cfg);
  HyperbolicOptions ho;
  ho.horizon = cfg.positive("hyperbolic", "horizon", 15.0);
  ho.pullback_depth = cfg.positive("hyperbolic", "depth", 20.0);
  ho.max_depth = cfg.positive("hyperbolic", "max_depth", 2000.0);
  ho.cauchy_tol = cfg.positive("hyperbolic", "cauchy_tol", 1e-8);
  ho.step = cfg.positive("hyperbolic", "step", 1e-2);
  ho.min_margin = cfg.positive("hyperbolic", "min_margin", 0.05);
  HyperbolicityOptions vo;
  vo.window = cfg.positive("hyperbolic", "window", 5.0);
  vo.nodes = cfg.integer("hyperbolic", "nodes", 16);
  vo.min_rate = cfg.positive("hyperbolic", "min_rate", 0.05);
  vo.samples = cfg.integer("hyperbolic", "verify_samples", 64);
  vo.verify.tol = cfg.positive("hyperbolic", "verify_tol", 1e-6);
  cfg.finish();

  const LimitingSystems ls = limiting_systems(xs, a0, b0, beta);
  const CandidateSet set = find_hyperbolic_solutions(ls.z, ho);
  out.constants = {{"a1", ls.z.coeffs.a1}, {"a2", ls.z.coeffs.a2}, {"k1", ls.z.coeffs.k1},
                   {"in_regime", set.in_regime ? 1.0 : 0.0}, {"comparison_lo", set.comparison_lo},
                   {"comparison_hi", set.comparison_hi}};
  out.add(check_ge("candidates", static_cast<double>(set.candidates.size()), 4.0));
  Table report{{"line", "sign", "depth", "cauchy", "margin", "sup", "rank", "gamma", "rho", "exp1", "exp2"}, {}};
  Table traj;
  traj.header.push_back("t");
  for (const HyperbolicCandidate& h : set.candidates) {
    const std::string tag = to_string(h.line) + (h.sign > 0 ? "+" : "-") + ".";
    out.add(check_le(tag + "cauchy", h.cauchy, ho.cauchy_tol));
    out.add(check_ge(tag + "margin", h.margin, ho.min_margin));
    if (h.line == InvariantLine::E1) {
      out.add(check_ge(tag + "band_lower", h.margin, set.comparison_lo - 1e-9));
      out.add(check_le(tag + "band_upper", h.sup_abs, set.comparison_hi + 1e-9));
    }
    const HyperbolicityReport r = verify_hyperbolicity(h, ls.z, vo);
    out.holds(tag + "nondegenerate", !r.degenerate);
    if (!r.degenerate) {
      out.holds(tag + "verified", r.verification.pass);
      out.add(check_ge(tag + "rate_margin", r.rate_margin, vo.min_rate));
    }
    const auto& e = r.cert.exponents;
    report.add({h.line == InvariantLine::E1 ? 1.0 : 2.0, static_cast<double>(h.sign), h.depth, h.cauchy, h.margin,
                h.sup_abs, static_cast<double>(r.cert.rank), r.cert.gamma, r.cert.rho,
                e.size() > 0 ? e[0] : NAN, e.size() > 1 ? e[1] : NAN});
    traj.header.push_back(tag + "z1");
    traj.header.push_back(tag + "z2");
  }
  if (!set.candidates.empty()) {
    const Trajectory& first = set.candidates.front().z;
    for (std::size_t i = 0; i < first.size(); i += 10) {
      std::vector<double> row{first.time(i)};
      for (const HyperbolicCandidate& h : set.candidates) {
        row.push_back(h.z.state(i)(0));
        row.push_back(h.z.state(i)(1));
      }
      traj.add(std::move(row));
    }
  }
  out.file("candidates.csv", render([&](std::ostream& os) { write_table(os, report); }));
  out.file("trajectories.csv", render([&](std::ostream& os) { write_table(os, traj); }));
}

const std::map<std::string, Pipeline>& registry() {
  static const std::map<std::string, Pipeline> r{
      {"splitting", pipeline_splitting},
      {"sigma", [](Config& c, const RunOptions& o, Output& out) { pipeline_graph(c, o, out, true); }},
      {"theta", [](Config& c, const RunOptions& o, Output& out) { pipeline_graph(c, o, out, false); }},
      {"saddle", pipeline_saddle},
      {"roughness", pipeline_roughness},
      {"fine-structure", pipeline_fine},
      {"pde-spectrum", pipeline_spectrum},
      {"pde-hyperbolic", pipeline_hyperbolic},
  };
  return r;
}

std::string manifest(const RunResult& res, const Config& cfg, const RunOptions& opts, const KeyValues& constants) {
  std::ostringstream os;
  os << "# run manifest\n";
  os << "scenario=" << res.name << "\npipeline=" << res.pipeline << "\nthreads=" << std::max(1, opts.threads) << '\n';
  for (const auto& [k, v] : cfg.resolved()) os << k << '=' << v << '\n';
  for (const auto& [k, v] : constants) os << "constant." << k << '=' << format_double(v) << '\n';
  return os.str();
}

}  // namespace

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"splitting", "sigma",          "theta",        "saddle",
                                              "roughness", "fine-structure", "pde-spectrum", "pde-hyperbolic"};
  return names;
}

std::filesystem::path scenario_dir() { return INVMAN_SCENARIO_DIR; }

const std::vector<std::string>& bundled_scenarios() {
  static const std::vector<std::string> names{
      "quadratic_manifold", "saddle_rates",   "quadratic_mirror", "linear_splitting", "periodic_manifold",
      "roughness_swap",     "fine_structure", "pde_spectrum",     "pde_hyperbolic"};
  return names;
}

std::filesystem::path bundled_scenario(const std::string& name) {
  const auto& names = bundled_scenarios();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw InvalidArgument("no bundled scenario named '" + name + "'");
  return scenario_dir() / (name + ".cfg");
}

RunResult run_scenario(const std::filesystem::path& path, const RunOptions& opts) {
  RunResult res;
  Output out;
  std::optional<Config> cfg;
  try {
    cfg = Config::load(path);
    res.name = cfg->text("scenario", "name");
    res.pipeline = cfg->text("scenario", "pipeline");
    auto it = registry().find(res.pipeline);
    if (it == registry().end()) throw ParseError("unknown scenario.pipeline '" + res.pipeline + "'", 0);
    try {
      it->second(*cfg, opts, out);
    } catch (const ParseError&) {
      throw;
    } catch (const IoError&) {
      throw;
    } catch (const InvalidArgument&) {
      throw;
    } catch (const Error& e) {
      res.exit_code = exit_failure;
      res.message = res.pipeline + ": " + e.what();
    }
  } catch (const ParseError& e) {
    res.exit_code = exit_usage;
    res.message = path.filename().string() + ": " + e.what();
    return res;
  } catch (const IoError& e) {
    res.exit_code = exit_usage;
    res.message = e.what();
    return res;
  } catch (const InvalidArgument& e) {
    res.exit_code = exit_usage;
    res.message = res.pipeline + ": " + e.what();
    return res;
  }
  res.summary = out.summary;
  if (res.exit_code == exit_pass && !res.summary.pass()) res.exit_code = exit_failure;

  res.artifacts.emplace_back("manifest.txt", manifest(res, *cfg, opts, out.constants));
  std::ostringstream sum;
  write_summary(sum, res.summary);
  if (!res.message.empty()) sum << "error=" << res.message << '\n';
  res.artifacts.emplace_back("summary.txt", sum.str());
  for (auto& f : out.files) res.artifacts.push_back(std::move(f));

  res.out_dir = opts.out_dir.empty() ? std::filesystem::path("out") / res.name : opts.out_dir;
  if (opts.write) {
    try {
      for (const auto& [name, content] : res.artifacts) write_file(res.out_dir / name, content);
    } catch (const IoError& e) {
      res.exit_code = exit_usage;
      res.message = e.what();
    }
  }
  return res;
}

}  // namespace invman
