#include "blowup/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blowup {
namespace {

// Relative tolerance for deciding q == 2p/(p+1).
constexpr double kCriticalTol = 1e-12;

ExponentRegime classify(double q, double q_crit) {
  if (std::abs(q - q_crit) <= kCriticalTol * q_crit) {
    return ExponentRegime::Critical;
  }
  return q < q_crit ? ExponentRegime::Subcritical
                    : ExponentRegime::Supercritical;
}

}  // namespace

ProblemSpec make_problem(double p, double q, GridFunction b, GridFunction u0,
                         const Grid& g, std::vector<std::string>* warnings) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("problem: p must be > 1");
  }
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw std::invalid_argument("problem: q must be > 1");
  }
  if (b.size() != g.size() || u0.size() != g.size()) {
    throw std::invalid_argument("problem: b and u0 must have N+2 node values");
  }
  if (!b.allFinite() || !u0.allFinite()) {
    throw std::invalid_argument("problem: b and u0 must be finite");
  }
  if ((b.array() < 0.0).any()) {
    throw std::invalid_argument("problem: b must be nonnegative");
  }
  if ((u0.array() < 0.0).any()) {
    throw std::invalid_argument("problem: u0 must be nonnegative");
  }
  if (u0[0] != 0.0 || u0[u0.size() - 1] != 0.0) {
    throw std::invalid_argument("problem: u0 must vanish at x = -1 and x = 1");
  }
  const double q_crit = 2.0 * p / (p + 1.0);
  if (warnings && classify(q, q_crit) == ExponentRegime::Supercritical) {
    std::ostringstream os;
    os << "q = " << q << " exceeds 2p/(p+1) = " << q_crit
       << "; the blow-up theorem does not apply";
    warnings->push_back(os.str());
  }
  return ProblemSpec{p, q, std::move(b), std::move(u0)};
}

ProblemSpec sample(const ProblemFamily& family, const Grid& g,
                   std::vector<std::string>* warnings) {
  if (!family.b || !family.u0) {
    throw std::invalid_argument("problem: b and u0 functions are required");
  }
  GridFunction b(g.size()), u0(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    b[j] = family.b(g.x(j));
    u0[j] = family.u0(g.x(j));
  }
  u0[0] = 0.0;
  u0[g.size() - 1] = 0.0;
  // Round-off in closed forms such as sin(pi (x+1)/2) can dip below zero.
  u0 = u0.cwiseMax(0.0);
  return make_problem(family.p, family.q, std::move(b), std::move(u0), g,
                      warnings);
}

GridFunction rhs(const GridFunction& u, const ProblemSpec& spec, const Grid& g) {
  detail::check_aligned(u, g, "rhs");
  if (!u.allFinite()) {
    throw std::domain_error("rhs: non-finite state");
  }
  GridFunction out(g.n_interior);
  rhs_into(u, spec.b, spec.p, spec.q, g.h, out);
  return out;
}

CriticalConstants critical_constants(double p, double q, double b_inf) {
  CriticalConstants k;
  k.q_crit = 2.0 * p / (p + 1.0);
  k.b_crit = 0.5 * (p - 1.0) * std::pow(2.0 / (p + 1.0), 1.0 / (p + 1.0));
  k.c = b_inf * std::pow(2.0 / (p + 1.0), 0.5 * q);
  k.beta = classify(q, k.q_crit) == ExponentRegime::Critical
               ? 0.0
               : p - 0.5 * q * (p + 1.0);
  if (k.beta > 0.0) {
    k.norm_threshold = std::pow(k.c * (p + 1.0) / (p - 1.0), 1.0 / k.beta);
  }
  return k;
}

double energy(const GridFunction& u, const Grid& g, double p) {
  detail::check_aligned(u, g, "energy");
  const auto n1 = g.n_interior + 1;
  const double grad = (u.segment(1, n1) - u.segment(0, n1)).squaredNorm() / g.h;
  const double pot =
      g.h * u.segment(1, n1).cwiseAbs().array().pow(p + 1.0).sum();
  return 0.5 * grad - pot / (p + 1.0);
}

CriteriaReport check_blowup_criteria(const ProblemSpec& spec, const Grid& g) {
  CriteriaReport r;
  r.constants = critical_constants(spec);
  r.regime = classify(spec.q, r.constants.q_crit);
  r.b_inf = spec.b_inf();
  r.energy0 = energy(spec.u0, g, spec.p);
  r.energy_negative = r.energy0 < 0.0;
  r.norm_p1 = discrete_norm(spec.u0, g, spec.p + 1.0);

  bool regime_ok = false;
  switch (r.regime) {
    case ExponentRegime::Critical:
      r.b_below_critical = r.b_inf < r.constants.b_crit;
      regime_ok = *r.b_below_critical;
      break;
    case ExponentRegime::Subcritical:
      r.norm_above_threshold = r.norm_p1 > r.constants.norm_threshold.value();
      regime_ok = *r.norm_above_threshold;
      break;
    case ExponentRegime::Supercritical:
      break;
  }
  r.theorem_applies = r.energy_negative && regime_ok;

  const GridFunction du0 = rhs(spec.u0, spec, g);
  r.min_initial_derivative = du0.minCoeff();
  r.initial_derivative_nonneg = r.min_initial_derivative >= 0.0;
  return r;
}

const char* to_string(ExponentRegime r) {
  switch (r) {
    case ExponentRegime::Subcritical:
      return "subcritical";
    case ExponentRegime::Critical:
      return "critical";
    case ExponentRegime::Supercritical:
      return "supercritical";
  }
  return "unknown";
}

double lipschitz_bound(double radius, double center_norm2, const Grid& g,
                       const ProblemSpec& spec) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("lipschitz_bound: radius must be > 0");
  }
  const double h = g.h;
  const double p = spec.p;
  const double q = spec.q;
  const double growth = p / std::pow(h, 0.5 * (p - 1.0)) +
                        q * spec.b_inf() / std::pow(h, 0.5 * (3.0 * q - 1.0));
  return 4.0 / h + growth * std::pow(2.0 * center_norm2 + radius, p - 1.0);
}

}  // namespace blowup
