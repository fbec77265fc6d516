#ifndef BLOWUP_MODEL_HPP
#define BLOWUP_MODEL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/grid.hpp"

namespace blowup {

/// Sampled problem data for u_t = u_xx + |u|^p - b(x)|u_x|^q on (-1, 1).
struct ProblemSpec {
  double p = 3.0;
  double q = 1.5;
  GridFunction b;   // b_j >= 0 at every node
  GridFunction u0;  // u0_j >= 0, zero at both ends

  double b_inf() const { return b.size() ? b.maxCoeff() : 0.0; }
};

/// Problem data given as functions of x, so any grid can be sampled exactly.
struct ProblemFamily {
  double p = 3.0;
  double q = 1.5;
  std::function<double(double)> b;
  std::function<double(double)> u0;
};

/// Validates and returns the spec. Messages about regimes outside the blow-up
/// theorem (q above 2p/(p+1)) are appended to `warnings` when given.
ProblemSpec make_problem(double p, double q, GridFunction b, GridFunction u0,
                         const Grid& g,
                         std::vector<std::string>* warnings = nullptr);

/// Samples b and u0 at the nodes of g; boundary values of u0 are forced to 0.
ProblemSpec sample(const ProblemFamily& family, const Grid& g,
                   std::vector<std::string>* warnings = nullptr);

/// Semidiscrete right-hand side written into `out` (length N):
///   out_j = d2x u_j + |u_j|^p - b_j |dx u_j|^q,  j = 1..N.
/// `u` holds all N+2 node values. Allocation-free for the integrator loop.
template <typename Derived, typename Out>
void rhs_into(const Eigen::MatrixBase<Derived>& u, const GridFunction& b,
              double p, double q, double h, Eigen::MatrixBase<Out>& out) {
  using S = typename Derived::Scalar;
  const Eigen::Index n = u.size() - 2;
  const S inv_h2 = S(1) / (S(h) * S(h));
  const S inv_2h = S(1) / (S(2) * S(h));
  for (Eigen::Index j = 1; j <= n; ++j) {
    const S uj = u[j];
    const S lap = (u[j + 1] - S(2) * uj + u[j - 1]) * inv_h2;
    const S grad = std::abs((u[j + 1] - u[j - 1]) * inv_2h);
    // 0^q = 0 since q > 1; std::pow agrees but skip the call.
    const S damp = grad == S(0) ? S(0) : S(b[j]) * std::pow(grad, S(q));
    out[j - 1] = lap + std::pow(std::abs(uj), S(p)) - damp;
  }
}

/// du_j/dt for j = 1..N. Throws std::domain_error on non-finite input.
GridFunction rhs(const GridFunction& u, const ProblemSpec& spec, const Grid& g);

struct CriticalConstants {
  double q_crit = 0.0;  // 2p/(p+1)
  double b_crit = 0.0;  // ((p-1)/2) (2/(p+1))^{1/(p+1)}
  double c = 0.0;       // b_inf (2/(p+1))^{q/2}
  double beta = 0.0;    // p - q(p+1)/2
  /// (c(p+1)/(p-1))^{1/beta}; empty when beta <= 0.
  std::optional<double> norm_threshold;
};

CriticalConstants critical_constants(double p, double q, double b_inf);
inline CriticalConstants critical_constants(const ProblemSpec& spec) {
  return critical_constants(spec.p, spec.q, spec.b_inf());
}

/// J = 1/2 sum_{j=1}^{N+1} (u_j - u_{j-1})^2 / h
///     - 1/(p+1) sum_{j=1}^{N+1} h |u_j|^{p+1}.
double energy(const GridFunction& u, const Grid& g, double p);

enum class ExponentRegime { Subcritical, Critical, Supercritical };

/// Hypotheses of the finite-time blow-up theorem evaluated on the initial data.
struct CriteriaReport {
  double energy0 = 0.0;
  bool energy_negative = false;
  ExponentRegime regime = ExponentRegime::Subcritical;
  CriticalConstants constants;
  double b_inf = 0.0;
  double norm_p1 = 0.0;  // ||U0||_{p+1}
  std::optional<bool> b_below_critical;      // only when q == q_crit
  std::optional<bool> norm_above_threshold;  // only when q < q_crit
  double min_initial_derivative = 0.0;
  bool initial_derivative_nonneg = false;
  /// J(0) < 0 and the regime-specific condition hold.
  bool theorem_applies = false;
};

CriteriaReport check_blowup_criteria(const ProblemSpec& spec, const Grid& g);

const char* to_string(ExponentRegime r);

/// Local Lipschitz constant of the right-hand side on the l2 ball of the
/// given radius around a centre of norm `center_norm2`:
///   4/h + (p/h^{(p-1)/2} + q b_inf / h^{(3q-1)/2}) (2||X*||_2 + r)^{p-1}.
double lipschitz_bound(double radius, double center_norm2, const Grid& g,
                       const ProblemSpec& spec);

}  // namespace blowup

#endif  // BLOWUP_MODEL_HPP
