#include "blowup/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace blowup {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = slope * x + intercept, x centred for
// conditioning.
LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

void require_points(std::span<const Monitor> window, const char* who) {
  if (window.size() < kMinFitPoints) {
    std::ostringstream os;
    os << who << ": " << window.size() << " monitor points in the fit window, "
       << "need at least " << kMinFitPoints;
    throw NoBlowupTrend(os.str());
  }
}

}  // namespace

TimeBounds blowup_time_bounds(const ProblemSpec& spec, const Grid& g) {
  const auto interior = spec.u0.segment(1, g.n_interior);
  const double sum_sq = interior.squaredNorm();
  if (!(sum_sq > 0.0)) {
    throw std::invalid_argument(
        "blowup_time_bounds: zero initial data has no finite lower bound");
  }
  const double p = spec.p;
  TimeBounds tb;
  tb.lower = 1.0 / ((p - 1.0) * std::pow(sum_sq, 0.5 * (p - 1.0)));

  const CriticalConstants k = critical_constants(spec);
  const double norm_p1 = discrete_norm(spec.u0, g, p + 1.0);
  const double norm_2 = discrete_norm(spec.u0, g, 2.0);
  tb.k = (p - 1.0) / (p + 1.0) - k.c * std::pow(norm_p1, -k.beta);
  if (k.beta < 0.0) {
    tb.upper_missing_reason = "q above 2p/(p+1)";
  } else if (!(tb.k > 0.0)) {
    tb.upper_missing_reason = "k <= 0";
  } else {
    tb.upper = 1.0 / ((p - 1.0) * tb.k * std::pow(norm_2, p - 1.0));
  }
  return tb;
}

std::span<const Monitor> fit_window(std::span<const Monitor> monitors) {
  if (monitors.empty()) return monitors;
  const double level = 0.1 * monitors.back().sup_norm;
  std::size_t first = monitors.size();
  while (first > 0 && monitors[first - 1].sup_norm >= level) --first;
  return monitors.subspan(first);
}

double estimate_blowup_time(std::span<const Monitor> monitors, double p) {
  const auto window = fit_window(monitors);
  require_points(window, "estimate_blowup_time");
  const double t_last = window.back().t;
  std::vector<double> x, y;
  x.reserve(window.size());
  y.reserve(window.size());
  for (const auto& m : window) {
    if (!(m.sup_norm > 0.0)) {
      throw NoBlowupTrend("estimate_blowup_time: zero sup-norm in fit window");
    }
    x.push_back(m.t - t_last);
    y.push_back(std::pow(m.sup_norm, -(p - 1.0)));
  }
  const LineFit f = fit_line(x, y);
  if (!(f.slope < 0.0)) {
    throw NoBlowupTrend(
        "estimate_blowup_time: sup_norm^{-(p-1)} is not decreasing in t");
  }
  return t_last - f.intercept / f.slope;
}

double fit_rate_exponent(std::span<const Monitor> monitors, double t_est) {
  const auto window = fit_window(monitors);
  require_points(window, "fit_rate_exponent");
  std::vector<double> x, y;
  for (const auto& m : window) {
    const double gap = t_est - m.t;
    if (gap > 0.0 && m.sup_norm > 0.0) {
      x.push_back(std::log(gap));
      y.push_back(std::log(m.sup_norm));
    }
  }
  if (x.size() < kMinFitPoints) {
    throw NoBlowupTrend("fit_rate_exponent: too few points before T_est");
  }
  return fit_line(x, y).slope;
}

BlowupPoint blowup_point(const Trajectory& traj, const Grid& g) {
  if (traj.status.kind != StopKind::BlewUp) {
    throw InvalidState(std::string("blowup_point: trajectory status is ") +
                       to_string(traj.status.kind));
  }
  const GridFunction& u = traj.final_state;
  BlowupPoint bp;
  u.maxCoeff(&bp.node);  // first maximal index
  bp.x = g.x(bp.node);
  const double top = u[bp.node];
  for (Eigen::Index j = bp.node + 1; j < u.size(); ++j) {
    if (u[j] == top) {
      bp.tie = true;
      break;
    }
  }
  return bp;
}

BlowupReport analyze(const Trajectory& traj, const ProblemSpec& spec,
                     const Grid& g) {
  BlowupReport r;
  r.status = traj.status;
  r.t_stop = traj.status.t_stop;
  r.rate_expected = -1.0 / (spec.p - 1.0);
  r.criteria = check_blowup_criteria(spec, g);
  try {
    r.bounds = blowup_time_bounds(spec, g);
  } catch (const std::invalid_argument& e) {
    r.bounds.lower = kNaN;
    r.bounds.upper_missing_reason = e.what();
  }
  if (traj.status.kind != StopKind::BlewUp) {
    r.note = std::string("no blow-up: ") + to_string(traj.status.kind);
    return r;
  }
  r.point = blowup_point(traj, g);
  try {
    // The solution is finite at t_stop, so T* cannot precede it.
    r.t_est = std::max(estimate_blowup_time(traj.monitors, spec.p), r.t_stop);
    r.rate_exponent = fit_rate_exponent(traj.monitors, *r.t_est);
  } catch (const NoBlowupTrend& e) {
    r.note = e.what();
  }
  return r;
}

double interpolate_cubic(const GridFunction& u, const Grid& g, double x) {
  detail::check_aligned(u, g, "interpolate_cubic");
  const Eigen::Index last = g.size() - 1;
  const double s = (x + 1.0) / g.h;
  const auto nearest = static_cast<Eigen::Index>(std::llround(s));
  if (nearest >= 0 && nearest <= last && std::abs(s - nearest) < 1e-9) {
    return u[nearest];
  }
  Eigen::Index i = static_cast<Eigen::Index>(std::floor(s));
  i = std::clamp<Eigen::Index>(i - 1, 0, std::max<Eigen::Index>(last - 3, 0));
  const Eigen::Index count = std::min<Eigen::Index>(4, g.size());
  double value = 0.0;
  for (Eigen::Index a = i; a < i + count; ++a) {
    double w = 1.0;
    for (Eigen::Index b = i; b < i + count; ++b) {
      if (b != a) w *= (x - g.x(b)) / (g.x(a) - g.x(b));
    }
    value += w * u[a];
  }
  return value;
}

ConvergenceReport convergence_study(const ProblemFamily& family,
                                    std::span<const Eigen::Index> n_list,
                                    double t_check,
                                    const IntegratorConfig& base_cfg) {
  if (n_list.size() < 3) {
    throw std::invalid_argument("convergence_study: need at least 3 grids");
  }
  if (!(t_check > 0.0)) {
    throw std::invalid_argument("convergence_study: t_check must be > 0");
  }
  ConvergenceReport rep;
  rep.grids.assign(n_list.begin(), n_list.end());
  const Eigen::Index finest = *std::max_element(n_list.begin(), n_list.end());
  rep.reference_n = 4 * (finest + 1) - 1;

  IntegratorConfig cfg = base_cfg;
  cfg.t_max = t_check;
  cfg.snapshot_times.clear();
  cfg.snapshot_stride = 0;
  cfg.keep_monitor_states = false;
  cfg.monitor_stride = std::numeric_limits<std::int64_t>::max();

  struct Run {
    Grid grid;
    Trajectory traj;
  };
  auto solve = [&family, &cfg](Eigen::Index n) {
    Run run{build_grid(n), {}};
    const ProblemSpec spec = sample(family, run.grid);
    run.traj = integrate(spec, run.grid, cfg);
    return run;
  };

  std::vector<std::future<Run>> pending;
  pending.push_back(std::async(std::launch::async, solve, rep.reference_n));
  for (const auto n : rep.grids) {
    pending.push_back(std::async(std::launch::async, solve, n));
  }
  std::vector<Run> runs;
  for (auto& f : pending) runs.push_back(f.get());

  auto reached = [t_check](const Run& run) {
    return run.traj.status.kind == StopKind::ReachedHorizon &&
           run.traj.final_t >= t_check;
  };
  const Run& ref = runs.front();
  if (!reached(ref)) {
    rep.partial = true;
    rep.flags.push_back("reference run stopped before t_check (" +
                        std::string(to_string(ref.traj.status.kind)) + ")");
  }
  for (std::size_t i = 0; i < rep.grids.size(); ++i) {
    const Run& run = runs[i + 1];
    rep.h.push_back(run.grid.h);
    if (!reached(run) || !reached(ref)) {
      if (!reached(run)) {
        rep.partial = true;
        rep.flags.push_back("N=" + std::to_string(rep.grids[i]) +
                            " stopped before t_check (" +
                            to_string(run.traj.status.kind) + ")");
      }
      rep.errors.push_back(kNaN);
      continue;
    }
    double err = 0.0;
    for (Eigen::Index j = 1; j <= run.grid.n_interior; ++j) {
      const double exact =
          interpolate_cubic(ref.traj.final_state, ref.grid, run.grid.x(j));
      err = std::max(err, std::abs(run.traj.final_state[j] - exact));
    }
    rep.errors.push_back(err);
  }
  for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i) {
    const double e0 = rep.errors[i], e1 = rep.errors[i + 1];
    const double h0 = rep.h[i], h1 = rep.h[i + 1];
    const bool ok = e0 > 0.0 && e1 > 0.0 && std::isfinite(e0) &&
                    std::isfinite(e1) && h0 != h1;
    rep.order_defined.push_back(ok);
    rep.orders.push_back(ok ? std::log(e0 / e1) / std::log(h0 / h1) : kNaN);
    if (!ok) {
      rep.flags.push_back("order between N=" + std::to_string(rep.grids[i]) +
                          " and N=" + std::to_string(rep.grids[i + 1]) +
                          " undefined");
    }
  }
  return rep;
}

}  // namespace blowup
