#include "blowup/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blowup {
namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, DOPRI5).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMinFactor = 0.2;  // largest shrink per step is 1/5
constexpr double kMaxFactor = 10.0;

using Vec = GridFunction;

class Stepper {
 public:
  Stepper(const ProblemSpec& spec, const Grid& g)
      : spec_(spec), g_(g), n_(g.n_interior) {
    for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_}) k->resize(n_);
    stage_ = Vec::Zero(n_ + 2);
    trial_ = Vec::Zero(n_ + 2);
    err_.resize(n_);
  }

  // Derivative at y into out; false if any entry is non-finite.
  bool eval(const Vec& y, Vec& out) {
    rhs_into(y, spec_.b, spec_.p, spec_.q, g_.h, out);
    return out.allFinite();
  }

  void prime(const Vec& y) { k1_valid_ = eval(y, k1_); }

  // One trial step of size dt from y. On success `trial()` holds the
  // candidate and the scaled RMS error is returned; +inf when the stage
  // values are not finite.
  double attempt(const Vec& y, double dt, double rtol, double atol) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (!k1_valid_) return kInf;
    auto in = [this](auto&& expr) { stage_.segment(1, n_) = expr; };
    const auto yi = y.segment(1, n_);

    in(yi + dt * a21 * k1_);
    if (!eval(stage_, k2_)) return kInf;
    in(yi + dt * (a31 * k1_ + a32 * k2_));
    if (!eval(stage_, k3_)) return kInf;
    in(yi + dt * (a41 * k1_ + a42 * k2_ + a43 * k3_));
    if (!eval(stage_, k4_)) return kInf;
    in(yi + dt * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_));
    if (!eval(stage_, k5_)) return kInf;
    in(yi + dt * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_));
    if (!eval(stage_, k6_)) return kInf;
    trial_.segment(1, n_) =
        yi + dt * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    if (!trial_.allFinite()) return kInf;
    if (!eval(trial_, k7_)) return kInf;

    err_ = dt * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ +
                 e7 * k7_);
    const auto scale =
        (atol + rtol * yi.cwiseAbs().cwiseMax(trial_.segment(1, n_).cwiseAbs())
                           .array());
    const double e = std::sqrt((err_.array() / scale).square().mean());
    return std::isfinite(e) ? e : kInf;
  }

  // First-same-as-last: the last stage is the next step's first.
  void accept(Vec& y) {
    y.swap(trial_);
    k1_.swap(k7_);
    k1_valid_ = true;
  }

 private:
  const ProblemSpec& spec_;
  const Grid& g_;
  Eigen::Index n_;
  Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, stage_, trial_, err_;
  bool k1_valid_ = false;
};

void record(Trajectory& traj, double t, const Vec& u, const Grid& g, double p,
            bool keep_state) {
  traj.monitors.push_back(make_monitor(t, u, g, p));
  if (keep_state) traj.monitor_states.push_back(u);
}

// Core loop shared by integrate() and resume(). `traj` carries the current
// state in final_state/final_t and the controller state.
void advance(Trajectory& traj, const ProblemSpec& spec, const Grid& g,
             const IntegratorConfig& cfg) {
  Vec u = traj.final_state;
  double t = traj.final_t;
  double dt = traj.next_dt > 0.0 ? traj.next_dt : cfg.dt_init;
  double err_old = traj.last_error;

  auto next_snap = std::upper_bound(cfg.snapshot_times.begin(),
                                    cfg.snapshot_times.end(), t);
  std::int64_t since_monitor = 0;
  bool last_recorded = true;

  Stepper stepper(spec, g);
  stepper.prime(u);

  auto finish = [&](StopKind kind) {
    if (!last_recorded) record(traj, t, u, g, spec.p, cfg.keep_monitor_states);
    traj.status = {kind, t};
    traj.final_state = u;
    traj.final_t = t;
    traj.next_dt = dt;
    traj.last_error = err_old;
  };

  if (t >= cfg.t_max) {
    finish(StopKind::ReachedHorizon);
    return;
  }

  for (;;) {
    if (dt < cfg.dt_min) {
      finish(StopKind::StepUnderflow);
      return;
    }
    // Land exactly on the horizon and on requested snapshot times.
    double target = cfg.t_max;
    if (next_snap != cfg.snapshot_times.end()) {
      target = std::min(target, *next_snap);
    }
    const bool clipped = t + dt >= target;
    const double h = clipped ? target - t : dt;
    if (t + h == t) {
      // The step no longer changes t in double precision.
      finish(StopKind::StepUnderflow);
      return;
    }

    const double err = stepper.attempt(u, h, cfg.rel_tol, cfg.abs_tol);
    if (!std::isfinite(err)) {
      ++traj.rejected_steps;
      dt = 0.5 * h;
      continue;
    }
    const double fac11 = std::pow(err, kExpo);
    if (err > 1.0) {
      ++traj.rejected_steps;
      dt = h / std::min(1.0 / kMinFactor, fac11 / kSafety);
      continue;
    }

    double fac = fac11 / std::pow(err_old, kBeta);
    fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
    err_old = std::max(err, 1e-4);
    // A clipped step says nothing about the unclipped dt; keep the larger.
    dt = clipped ? std::max(dt, h / fac) : h / fac;

    stepper.accept(u);
    t = clipped ? target : t + h;
    ++traj.accepted_steps;
    last_recorded = false;

    if (next_snap != cfg.snapshot_times.end() && t >= *next_snap) {
      traj.snapshots.push_back({t, u});
      while (next_snap != cfg.snapshot_times.end() && *next_snap <= t) {
        ++next_snap;
      }
    } else if (cfg.snapshot_stride > 0 &&
               traj.accepted_steps % cfg.snapshot_stride == 0) {
      traj.snapshots.push_back({t, u});
    }

    if (++since_monitor >= cfg.monitor_stride) {
      record(traj, t, u, g, spec.p, cfg.keep_monitor_states);
      since_monitor = 0;
      last_recorded = true;
    }

    const double sup = u.cwiseAbs().maxCoeff();
    if (sup >= cfg.blowup_threshold) {
      finish(StopKind::BlewUp);
      return;
    }
    if (t >= cfg.t_max) {
      finish(StopKind::ReachedHorizon);
      return;
    }
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("integrator: tolerances must be > 0");
  }
  if (!(dt_min > 0.0) || !(dt_init > 0.0) || dt_min > dt_init) {
    throw std::invalid_argument("integrator: need 0 < dt_min <= dt_init");
  }
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("integrator: t_max must be finite and >= 0");
  }
  if (!(blowup_threshold > 0.0)) {
    throw std::invalid_argument("integrator: blowup_threshold must be > 0");
  }
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
    throw std::invalid_argument("integrator: snapshot_times must be sorted");
  }
  if (monitor_stride < 1 || snapshot_stride < 0) {
    throw std::invalid_argument("integrator: invalid stride");
  }
}

const char* to_string(StopKind k) {
  switch (k) {
    case StopKind::BlewUp:
      return "BlewUp";
    case StopKind::ReachedHorizon:
      return "ReachedHorizon";
    case StopKind::StepUnderflow:
      return "StepUnderflow";
  }
  return "Unknown";
}

double Trajectory::min_value_overall() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& mon : monitors) m = std::min(m, mon.min_value);
  return m;
}

Monitor make_monitor(double t, const GridFunction& u, const Grid& g,
                     double p) {
  Monitor m;
  m.t = t;
  m.sup_norm = u.cwiseAbs().maxCoeff(&m.argmax);
  m.argmax_x = g.x(m.argmax);
  m.energy = energy(u, g, p);
  m.min_value = u.minCoeff();
  return m;
}

Trajectory integrate(const ProblemSpec& spec, const Grid& g,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  detail::check_aligned(spec.u0, g, "integrate");
  if (spec.b.size() != g.size()) {
    throw std::invalid_argument("integrate: b must have N+2 node values");
  }
  const double sup0 = spec.u0.cwiseAbs().maxCoeff();
  if (!(cfg.blowup_threshold > sup0)) {
    throw std::invalid_argument(
        "integrate: blowup_threshold must exceed the initial sup-norm");
  }

  Trajectory traj;
  traj.final_state = spec.u0;
  traj.final_state[0] = 0.0;
  traj.final_state[g.size() - 1] = 0.0;
  traj.final_t = 0.0;
  record(traj, 0.0, traj.final_state, g, spec.p, cfg.keep_monitor_states);
  if (!cfg.snapshot_times.empty() && cfg.snapshot_times.front() <= 0.0) {
    traj.snapshots.push_back({0.0, traj.final_state});
  }
  advance(traj, spec, g, cfg);
  return traj;
}

Trajectory resume(Trajectory traj, const ProblemSpec& spec, const Grid& g,
                  const IntegratorConfig& cfg) {
  if (traj.status.kind != StopKind::ReachedHorizon) {
    throw InvalidState(std::string("resume: trajectory status is ") +
                       to_string(traj.status.kind));
  }
  cfg.validate();
  detail::check_aligned(traj.final_state, g, "resume");
  if (!(cfg.blowup_threshold > traj.final_state.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(
        "resume: blowup_threshold must exceed the current sup-norm");
  }
  advance(traj, spec, g, cfg);
  return traj;
}

}  // namespace blowup
