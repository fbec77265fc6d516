#include "blowup/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "blowup/presets.hpp"

namespace blowup {
namespace fs = std::filesystem;

namespace {

// Minimal RFC 4180 row builder.
class CsvRow {
 public:
  CsvRow& operator<<(const std::string& s) {
    sep();
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
      line_ += s;
    } else {
      line_ += '"';
      for (char c : s) {
        if (c == '"') line_ += '"';
        line_ += c;
      }
      line_ += '"';
    }
    return *this;
  }
  CsvRow& operator<<(const char* s) { return *this << std::string(s); }
  CsvRow& operator<<(double v) {
    if (std::isnan(v)) return *this << std::string();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return *this << std::string(buf);
  }
  CsvRow& operator<<(std::optional<double> v) {
    return v ? (*this << *v) : (*this << std::string());
  }
  CsvRow& operator<<(bool b) { return *this << (b ? "true" : "false"); }
  CsvRow& operator<<(std::optional<bool> b) {
    return b ? (*this << *b) : (*this << std::string());
  }
  CsvRow& operator<<(long long v) { return *this << std::to_string(v); }

  void write(std::ostream& os) const { os << line_ << "\r\n"; }

 private:
  void sep() {
    if (started_) line_ += ',';
    started_ = true;
  }
  std::string line_;
  bool started_ = false;
};

void header(std::ostream& os, std::initializer_list<const char*> cols) {
  CsvRow row;
  for (const char* c : cols) row << c;
  row.write(os);
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name,
                          fs::path* where = nullptr) {
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / (cfg.prefix + name);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  if (where) *where = path;
  return os;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(std::optional<double> v) { return v ? fmt(*v) : "n/a"; }

std::string fmt(std::optional<bool> v) {
  return v ? (*v ? "pass" : "fail") : "n/a";
}

void print_warnings(const std::vector<std::string>& w, std::ostream& err) {
  for (const auto& s : w) err << "warning: " << s << '\n';
}

// `cfg` with one swept parameter replaced. The value goes through the config
// parser so it is validated exactly like a config-file entry.
RunConfig with_sweep_value(RunConfig cfg, const std::string& param,
                           const std::string& value) {
  if (param == "b_const") {
    double b = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), b);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw std::invalid_argument("b_const: expected a number, got '" + value +
                                  "'");
    }
    cfg.b = value;
    return cfg;
  }
  const RunConfig parsed = make_run_config(KeyValues{{param, value}});
  if (param == "q") cfg.q = parsed.q;
  else if (param == "p") cfg.p = parsed.p;
  else cfg.n = parsed.n;
  return cfg;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg) {
  RunOutcome out;
  out.grid = build_grid(cfg.n);
  out.spec = sample(cfg.family(), out.grid, &out.warnings);
  out.traj = integrate(out.spec, out.grid, cfg.integrator);
  out.report = analyze(out.traj, out.spec, out.grid);
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::string& param,
                                const std::vector<std::string>& values) {
  if (std::find(kSweepParams.begin(), kSweepParams.end(), param) ==
      kSweepParams.end()) {
    throw std::invalid_argument("sweep parameter must be one of b_const, q, p, N");
  }
  std::vector<SweepRow> rows(values.size());
  auto work = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      const RunConfig cfg = with_sweep_value(base, param, values[i]);
      const RunOutcome res = run_experiment(cfg);
      row.status = res.traj.status;
      row.t_est = res.report.t_est;
      row.min_value_overall = res.traj.min_value_overall();
      if (res.report.point) row.blowup_x = res.report.point->x;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(values.size(),
                               std::thread::hardware_concurrency()));
  std::size_t next = 0;
  std::mutex m;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(m);
          if (next >= values.size()) return;
          i = next++;
        }
        work(i);
      }
    });
  }
  pool.clear();  // joins
  return rows;
}

void write_monitors_csv(std::ostream& os, const Trajectory& traj) {
  header(os, {"t", "sup_norm", "energy", "min_value", "argmax_x"});
  for (const auto& m : traj.monitors) {
    CsvRow row;
    row << m.t << m.sup_norm << m.energy << m.min_value << m.argmax_x;
    row.write(os);
  }
}

void write_snapshots_csv(std::ostream& os, const Trajectory& traj,
                         const Grid& g) {
  header(os, {"t", "x", "u"});
  auto emit = [&](double t, const GridFunction& u) {
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      CsvRow row;
      row << t << g.x(j) << u[j];
      row.write(os);
    }
  };
  for (const auto& s : traj.snapshots) emit(s.t, s.u);
  if (traj.snapshots.empty() || traj.snapshots.back().t != traj.final_t) {
    emit(traj.final_t, traj.final_state);
  }
}

void write_report_csv(std::ostream& os, const BlowupReport& r) {
  header(os, {"status", "t_stop", "T_est", "T_lower", "T_upper",
              "rate_exponent", "blowup_x", "energy_negative",
              "b_below_critical", "norm_above_threshold",
              "initial_derivative_nonneg", "theorem_applies"});
  CsvRow row;
  row << to_string(r.status.kind) << r.t_stop << r.t_est << r.bounds.lower
      << r.bounds.upper << r.rate_exponent
      << (r.point ? std::optional<double>(r.point->x) : std::nullopt)
      << r.criteria.energy_negative << r.criteria.b_below_critical
      << r.criteria.norm_above_threshold
      << r.criteria.initial_derivative_nonneg << r.criteria.theorem_applies;
  row.write(os);
}

void write_summary_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  header(os, {"value", "status", "t_stop", "T_est", "min_value_overall",
              "blowup_x"});
  for (const auto& r : rows) {
    CsvRow row;
    row << r.value;
    if (r.failed) {
      row << "failed" << "" << "" << "" << "";
    } else {
      row << to_string(r.status.kind) << r.status.t_stop << r.t_est
          << r.min_value_overall << r.blowup_x;
    }
    row.write(os);
  }
}

void write_criteria_csv(std::ostream& os, const CriteriaReport& c) {
  header(os, {"J0", "energy_negative", "regime", "q_crit", "b_crit", "c",
              "beta", "norm_threshold", "b_inf", "norm_p1", "b_below_critical",
              "norm_above_threshold", "min_initial_derivative",
              "initial_derivative_nonneg", "theorem_applies"});
  CsvRow row;
  row << c.energy0 << c.energy_negative << to_string(c.regime)
      << c.constants.q_crit << c.constants.b_crit << c.constants.c
      << c.constants.beta << c.constants.norm_threshold << c.b_inf << c.norm_p1
      << c.b_below_critical << c.norm_above_threshold
      << c.min_initial_derivative << c.initial_derivative_nonneg
      << c.theorem_applies;
  row.write(os);
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
  header(os, {"N", "h", "error", "order", "flag"});
  for (std::size_t i = 0; i < rep.grids.size(); ++i) {
    CsvRow row;
    row << static_cast<long long>(rep.grids[i]) << rep.h[i] << rep.errors[i];
    std::string flag;
    if (i == 0) {
      row << std::string();
    } else {
      row << rep.orders[i - 1];
      if (!rep.order_defined[i - 1]) flag = "order_undefined";
    }
    if (std::isnan(rep.errors[i])) flag = "stopped_before_t_check";
    row << flag;
    row.write(os);
  }
}

int cmd_run(const RunConfig& cfg_in, std::ostream& out, std::ostream& err) {
  if (!cfg_in.has_problem()) {
    err << "error: no problem configured (set --preset or u0=...)\n";
    return kExitUsage;
  }
  RunConfig cfg = cfg_in;
  auto& snaps = cfg.integrator.snapshot_times;
  if (snaps.empty() || snaps.front() > 0.0) snaps.insert(snaps.begin(), 0.0);

  const RunOutcome res = run_experiment(cfg);
  print_warnings(res.warnings, err);
  {
    auto os = open_output(cfg, "monitors.csv");
    write_monitors_csv(os, res.traj);
  }
  {
    auto os = open_output(cfg, "snapshots.csv");
    write_snapshots_csv(os, res.traj, res.grid);
  }
  {
    auto os = open_output(cfg, "report.csv");
    write_report_csv(os, res.report);
  }
  if (!cfg.quiet) {
    const auto& r = res.report;
    out << "status        " << to_string(r.status.kind) << '\n'
        << "t_stop        " << fmt(r.t_stop) << '\n'
        << "T_est         " << fmt(r.t_est) << '\n'
        << "T_lower       " << fmt(r.bounds.lower) << '\n'
        << "T_upper       " << fmt(r.bounds.upper) << '\n'
        << "rate_exponent " << fmt(r.rate_exponent) << " (expected "
        << fmt(r.rate_expected) << ")\n"
        << "blowup_x      "
        << (r.point ? fmt(r.point->x) : std::string("n/a")) << '\n'
        << "min_value     " << fmt(res.traj.min_value_overall()) << '\n'
        << "steps         " << res.traj.accepted_steps << " accepted, "
        << res.traj.rejected_steps << " rejected\n";
    if (!r.note.empty()) out << "note          " << r.note << '\n';
    out << "wrote " << (fs::path(cfg.out_dir) / cfg.prefix).string()
        << "{monitors,snapshots,report}.csv\n";
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.has_problem()) {
    err << "error: no problem configured (set --preset or u0=...)\n";
    return kExitUsage;
  }
  if (cfg.sweep_values.empty()) {
    err << "error: sweep needs at least one value (--values or sweep_values)\n";
    return kExitUsage;
  }
  if (std::find(kSweepParams.begin(), kSweepParams.end(), cfg.sweep_param) ==
      kSweepParams.end()) {
    err << "error: sweep parameter must be one of b_const, q, p, N\n";
    return kExitUsage;
  }
  const auto rows = run_sweep(cfg, cfg.sweep_param, cfg.sweep_values);
  for (const auto& r : rows) {
    if (r.failed) err << "value " << r.value << " failed: " << r.error << '\n';
  }
  auto os = open_output(cfg, "summary.csv");
  write_summary_csv(os, rows);
  if (!cfg.quiet) {
    for (const auto& r : rows) {
      out << cfg.sweep_param << '=' << r.value << "  "
          << (r.failed ? "failed" : to_string(r.status.kind)) << "  T_est="
          << fmt(r.t_est) << "  min=" << fmt(r.min_value_overall) << '\n';
    }
  }
  return kExitOk;
}

int cmd_criteria(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.has_problem()) {
    err << "error: no problem configured (set --preset or u0=...)\n";
    return kExitUsage;
  }
  std::vector<std::string> warnings;
  const Grid g = build_grid(cfg.n);
  const ProblemSpec spec = sample(cfg.family(), g, &warnings);
  print_warnings(warnings, err);
  const CriteriaReport c = check_blowup_criteria(spec, g);
  {
    auto os = open_output(cfg, "criteria.csv");
    write_criteria_csv(os, c);
  }
  if (!cfg.quiet) {
    const auto& k = c.constants;
    out << "J(0)                 " << fmt(c.energy0) << "  ["
        << (c.energy_negative ? "pass" : "fail") << ": J(0) < 0]\n"
        << "regime               " << to_string(c.regime) << " (q_crit = "
        << fmt(k.q_crit) << ")\n"
        << "b_inf                " << fmt(c.b_inf) << '\n'
        << "b_crit               " << fmt(k.b_crit) << "  ["
        << fmt(c.b_below_critical) << ": b_inf < b_crit]\n"
        << "c                    " << fmt(k.c) << '\n'
        << "beta                 " << fmt(k.beta) << '\n'
        << "norm_threshold       " << fmt(k.norm_threshold) << '\n'
        << "||U0||_{p+1}         " << fmt(c.norm_p1) << "  ["
        << fmt(c.norm_above_threshold) << ": above threshold]\n"
        << "min dU/dt(0)         " << fmt(c.min_initial_derivative) << "  ["
        << (c.initial_derivative_nonneg ? "pass" : "fail") << ": >= 0]\n"
        << "theorem applies      " << (c.theorem_applies ? "yes" : "no")
        << '\n';
  }
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.has_problem()) {
    err << "error: no problem configured (set --preset or u0=...)\n";
    return kExitUsage;
  }
  if (cfg.n_list.size() < 3) {
    err << "error: converge needs at least 3 grids in N_list\n";
    return kExitUsage;
  }
  const ConvergenceReport rep =
      convergence_study(cfg.family(), cfg.n_list, cfg.t_check, cfg.integrator);
  {
    auto os = open_output(cfg, "convergence.csv");
    write_convergence_csv(os, rep);
  }
  for (const auto& f : rep.flags) err << "flag: " << f << '\n';
  if (!cfg.quiet) {
    out << "reference N = " << rep.reference_n << ", t_check = "
        << fmt(cfg.t_check) << '\n';
    for (std::size_t i = 0; i < rep.grids.size(); ++i) {
      out << "N=" << rep.grids[i] << "  h=" << fmt(rep.h[i])
          << "  error=" << fmt(rep.errors[i]);
      if (i > 0) out << "  order=" << fmt(rep.orders[i - 1]);
      out << '\n';
    }
  }
  return kExitOk;
}

int cmd_presets(std::ostream& out) {
  for (const auto& p : presets()) {
    out << p.name << "\t[" << p.figure << "]\tp=" << p.p << " q=" << p.q
        << "\t" << p.description << '\n';
  }
  return kExitOk;
}

}  // namespace blowup
