#ifndef BLOWUP_INTEGRATOR_HPP
#define BLOWUP_INTEGRATOR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/model.hpp"

namespace blowup {

/// Raised when an operation is applied to a trajectory in the wrong state.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double dt_init = 1e-12;
  double dt_min = 1e-30;
  double t_max = 1.0;
  /// Stop with BlewUp once the sup-norm reaches this level.
  double blowup_threshold = 1e8;
  /// Sorted capture times; the step size is clipped to land on each.
  std::vector<double> snapshot_times;
  /// Also capture a snapshot every this many accepted steps (0 = off).
  std::int64_t snapshot_stride = 0;
  /// Accepted steps between monitor records.
  std::int64_t monitor_stride = 1;
  /// Keep the full node vector alongside every monitor record.
  bool keep_monitor_states = false;

  void validate() const;
};

struct Monitor {
  double t = 0.0;
  double sup_norm = 0.0;
  double energy = 0.0;
  double min_value = 0.0;
  Eigen::Index argmax = 0;
  double argmax_x = 0.0;
};

struct Snapshot {
  double t = 0.0;
  GridFunction u;
};

enum class StopKind { BlewUp, ReachedHorizon, StepUnderflow };

struct Status {
  StopKind kind = StopKind::ReachedHorizon;
  double t_stop = 0.0;
};

const char* to_string(StopKind k);

struct Trajectory {
  std::vector<Monitor> monitors;
  /// Parallel to `monitors` when IntegratorConfig::keep_monitor_states is set.
  std::vector<GridFunction> monitor_states;
  std::vector<Snapshot> snapshots;
  Status status;

  GridFunction final_state;
  double final_t = 0.0;
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  /// Step-size controller state carried over by resume().
  double next_dt = 0.0;
  double last_error = 1e-4;

  double min_value_overall() const;
};

/// Integrates the semidiscrete system from t = 0 with an embedded
/// Dormand-Prince 5(4) pair and PI step control. Boundary nodes are never
/// integrated and stay at zero.
Trajectory integrate(const ProblemSpec& spec, const Grid& g,
                     const IntegratorConfig& cfg);

/// Continues a ReachedHorizon trajectory up to the new cfg.t_max.
/// Throws InvalidState for any other status.
Trajectory resume(Trajectory traj, const ProblemSpec& spec, const Grid& g,
                  const IntegratorConfig& cfg);

Monitor make_monitor(double t, const GridFunction& u, const Grid& g, double p);

}  // namespace blowup

#endif  // BLOWUP_INTEGRATOR_HPP
