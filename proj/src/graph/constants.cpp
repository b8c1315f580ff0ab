#include "invman/graph/constants.hpp"

#include <cmath>
#include <limits>

#include "invman/core/errors.hpp"

namespace invman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_signs(double M, double gamma, double rho, double ell) {
  if (!(M >= 1.0)) throw InvalidArgument("M must be >= 1");
  if (!(gamma > rho)) throw InvalidArgument("gamma must exceed rho");
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw InvalidArgument("ell must be finite and >= 0");
}

double tail_term(double M, double gamma, double rho, double ell, double kappa) {
  return M * M * ell * ell * (1 + kappa) * (1 + M) / (gamma - rho - ell * M * (1 + kappa));
}

ParabolicConstants parabolic_block(double M, double gamma, double rho, double ell, const ParabolicParams& p) {
  if (!(p.N >= 1.0)) throw InvalidArgument("parabolic N must be >= 1");
  if (!(p.alpha >= 0.0 && p.alpha < 1.0)) throw InvalidArgument("parabolic alpha must lie in [0, 1)");
  ParabolicConstants c;
  c.N = p.N;
  c.alpha = p.alpha;
  const double g = std::tgamma(1.0 - p.alpha);
  const double e = 1.0 / (1.0 - p.alpha);
  const double w = std::pow(2.0 * M * M * ell * g, e);
  const double gap = gamma - rho;
  if (ell == 0.0) {
    c.kappa_minus = 0.0;
    c.kappa_plus = c.kappa_star = kInf;
  } else {
    c.kappa_star = (gap - w) / (2.0 * p.N * ell) - 1.0;
    c.kappa_plus = 0.5 * (gap - w) / (2.0 * p.N * ell) - 1.0;
    c.kappa_minus = std::pow(2.0, 1.0 - p.alpha) * M * M * ell * g / std::pow(gap + w, 1.0 - p.alpha);
  }
  c.kappa_chosen = c.kappa_minus;
  const double k = c.kappa_chosen;
  const double room = gap - 2.0 * ell * p.N * (1.0 + k);
  const double inner = 1.0 + ell * (1.0 + 2.0 * M) * p.N * (1.0 + k) / room;
  c.delta = room - std::pow(2.0 * g * ell * M * inner, e);
  c.nu = room > 0.0 ? 2.0 * ell * M * M * g / std::pow(room, 1.0 - p.alpha) : kInf;
  c.admissible = c.kappa_plus > 0.0 && c.kappa_minus <= c.kappa_plus && room > 0.0 && c.nu < 1.0;
  return c;
}

}  // namespace

double gap_threshold(double M) {
  if (!(M >= 1.0)) throw InvalidArgument("M must be >= 1");
  return std::max(M * M + 2.0 * M + std::sqrt(8.0 * M * M * M), 3.0 * M * M + 2.0 * M);
}

GapCheck gap_condition(double M, double gamma, double rho, double ell) {
  check_signs(M, gamma, rho, ell);
  GapCheck g;
  g.threshold = gap_threshold(M);
  g.ratio = ell == 0.0 ? kInf : (gamma - rho) / ell;
  g.margin = g.ratio - g.threshold;
  g.pass = g.ratio > g.threshold;
  return g;
}

double ConstantsLedger::tail_horizon(double tol) const {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("tail tolerance must lie in (0, 1)");
  const double rate = gamma - rho - 2.0 * M * ell * (1.0 + kappa_chosen);
  if (!(rate > 0.0)) throw PreconditionFailure("graph-transform integrand does not decay");
  return std::log(1.0 / tol) / rate;
}

double ConstantsLedger::manifold_growth() const { return rho + ell * M * (1.0 + kappa_chosen); }

double ConstantsLedger::stable_decay() const { return gamma - M * ell * (1.0 + kappa_chosen); }

std::vector<std::pair<std::string, double>> ConstantsLedger::entries() const {
  std::vector<std::pair<std::string, double>> out{
      {"M", M},
      {"gamma", gamma},
      {"rho", rho},
      {"ell", ell},
      {"gap_threshold", gap_threshold},
      {"gap_ratio", gap_ratio},
      {"kappa_minus", kappa_minus},
      {"kappa_plus", kappa_plus},
      {"kappa_star", kappa_star},
      {"kappa_chosen", kappa_chosen},
      {"delta", delta},
      {"delta_hat", delta_hat},
      {"nu", nu},
  };
  if (parabolic) {
    out.insert(out.end(), {{"par_N", parabolic->N},
                           {"par_alpha", parabolic->alpha},
                           {"kappa_minus_par", parabolic->kappa_minus},
                           {"kappa_plus_par", parabolic->kappa_plus},
                           {"kappa_star_par", parabolic->kappa_star},
                           {"kappa_chosen_par", parabolic->kappa_chosen},
                           {"delta_par", parabolic->delta},
                           {"nu_par", parabolic->nu}});
  }
  return out;
}

ConstantsLedger constants_ledger(double M, double gamma, double rho, double ell,
                                 std::optional<ParabolicParams> parabolic) {
  const GapCheck gap = gap_condition(M, gamma, rho, ell);
  ConstantsLedger c;
  c.M = M;
  c.gamma = gamma;
  c.rho = rho;
  c.ell = ell;
  c.gap_threshold = gap.threshold;
  c.gap_ratio = gap.ratio;
  if (parabolic) {
    c.parabolic = parabolic_block(M, gamma, rho, ell, *parabolic);
    if (!c.parabolic->admissible) throw PreconditionFailure("parabolic kappa interval is empty");
  } else if (!gap.pass) {
    throw PreconditionFailure("gap condition fails: ratio " + std::to_string(gap.ratio) + " <= threshold " +
                              std::to_string(gap.threshold));
  }
  if (!gap.pass) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    c.kappa_minus = c.kappa_plus = c.kappa_star = c.kappa_chosen = c.delta = c.delta_hat = c.nu = nan;
    return c;
  }
  if (ell == 0.0) {
    c.kappa_minus = 0.0;
    c.kappa_plus = c.kappa_star = kInf;
  } else {
    const double x = gap.ratio - M * M - 2.0 * M;
    const double disc = std::sqrt(x * x - 8.0 * M * M * M);
    c.kappa_plus = (x + disc) / (4.0 * M);
    // Product of the roots is M/2; avoids cancellation for small ell.
    c.kappa_minus = 2.0 * M * M / (x + disc);
    c.kappa_star = (gamma - rho) / (2.0 * M * ell) - M - 1.0;
  }
  c.kappa_chosen = c.kappa_minus;
  if (!(c.kappa_chosen < std::min(c.kappa_plus, c.kappa_star))) throw PreconditionFailure("kappa interval is empty");
  return with_kappa(c, c.kappa_chosen);
}

ConstantsLedger with_kappa(const ConstantsLedger& ledger, double kappa) {
  ConstantsLedger c = ledger;
  c.kappa_chosen = kappa;
  const double tail = c.ell == 0.0 ? 0.0 : tail_term(c.M, c.gamma, c.rho, c.ell, kappa);
  c.delta = c.gamma - c.M * c.ell - tail;
  c.delta_hat = c.rho + c.M * c.ell + tail;
  c.nu = 2.0 * c.ell * c.M * c.M / (c.gamma - c.rho - 2.0 * c.ell * c.M * (1.0 + kappa));
  return c;
}

}  // namespace invman
