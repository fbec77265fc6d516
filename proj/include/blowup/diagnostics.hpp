#ifndef BLOWUP_DIAGNOSTICS_HPP
#define BLOWUP_DIAGNOSTICS_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowup/integrator.hpp"
#include "blowup/model.hpp"

namespace blowup {

/// The monitor series does not show the growth needed for a blow-up fit.
class NoBlowupTrend : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeBounds {
  double lower = 0.0;
  /// 1 / ((p-1) k ||U0||_2^{p-1}); empty when k <= 0.
  std::optional<double> upper;
  /// k = (p-1)/(p+1) - c ||U0||_{p+1}^{-beta}.
  double k = 0.0;
  std::string upper_missing_reason;
};

/// Closed-form bounds on the semidiscrete blow-up time from the initial data.
/// The lower bound uses the unweighted sum of u_j(0)^2, the upper bound the
/// h-weighted l2 norm. Throws std::invalid_argument for zero data.
TimeBounds blowup_time_bounds(const ProblemSpec& spec, const Grid& g);

/// Minimum number of monitor records inside the fit window.
inline constexpr std::size_t kMinFitPoints = 10;

/// Monitors whose sup-norm is within one decade of the final sup-norm.
std::span<const Monitor> fit_window(std::span<const Monitor> monitors);

/// Blow-up time from the root of the least-squares line through
/// (t, sup_norm^{-(p-1)}) over the fit window. Throws NoBlowupTrend.
double estimate_blowup_time(std::span<const Monitor> monitors, double p);

/// Least-squares slope of log(sup_norm) against log(T_est - t) over the fit
/// window; -1/(p-1) for the asymptotic rate. Throws NoBlowupTrend.
double fit_rate_exponent(std::span<const Monitor> monitors, double t_est);

struct BlowupPoint {
  Eigen::Index node = 0;
  double x = 0.0;
  /// Another node shares the maximum value.
  bool tie = false;
};

/// Argmax of the final state, lowest index on ties. Throws InvalidState
/// unless the trajectory blew up.
BlowupPoint blowup_point(const Trajectory& traj, const Grid& g);

struct BlowupReport {
  Status status;
  double t_stop = 0.0;
  std::optional<double> t_est;
  TimeBounds bounds;
  std::optional<double> rate_exponent;
  double rate_expected = 0.0;
  std::optional<BlowupPoint> point;
  CriteriaReport criteria;
  /// Why t_est / rate_exponent are missing, if they are.
  std::string note;
};

/// Collects every post-processing quantity for one run.
BlowupReport analyze(const Trajectory& traj, const ProblemSpec& spec,
                     const Grid& g);

struct ConvergenceReport {
  std::vector<Eigen::Index> grids;
  std::vector<double> h;
  std::vector<double> errors;
  /// orders[i] compares grids i and i+1; NaN when undefined.
  std::vector<double> orders;
  std::vector<bool> order_defined;
  Eigen::Index reference_n = 0;
  /// A run stopped before t_check; errors past it are NaN.
  bool partial = false;
  std::vector<std::string> flags;
};

/// Sup-norm errors at t_check against a reference solve on a grid four times
/// finer than the finest requested one. The reference is evaluated at coarse
/// nodes by local cubic interpolation. Runs execute concurrently.
ConvergenceReport convergence_study(const ProblemFamily& family,
                                    std::span<const Eigen::Index> n_list,
                                    double t_check,
                                    const IntegratorConfig& base_cfg);

/// Cubic Lagrange interpolation of node values `u` on `g` at x.
double interpolate_cubic(const GridFunction& u, const Grid& g, double x);

}  // namespace blowup

#endif  // BLOWUP_DIAGNOSTICS_HPP
