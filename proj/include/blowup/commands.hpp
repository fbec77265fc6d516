#ifndef BLOWUP_COMMANDS_HPP
#define BLOWUP_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "blowup/config.hpp"
#include "blowup/diagnostics.hpp"

namespace blowup {

/// Process exit codes used by the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct RunOutcome {
  Grid grid;
  ProblemSpec spec;
  Trajectory traj;
  BlowupReport report;
  std::vector<std::string> warnings;
};

/// Samples, integrates and analyzes one configuration.
RunOutcome run_experiment(const RunConfig& cfg);

struct SweepRow {
  std::string value;
  bool failed = false;
  std::string error;
  Status status;
  std::optional<double> t_est;
  double min_value_overall = 0.0;
  std::optional<double> blowup_x;
};

/// Parameter names accepted by run_sweep().
inline const std::vector<std::string> kSweepParams{"b_const", "q", "p", "N"};

/// Runs one experiment per value on worker threads; rows keep input order.
/// An invalid value yields a failed row and the sweep continues.
std::vector<SweepRow> run_sweep(const RunConfig& base, const std::string& param,
                                const std::vector<std::string>& values);

// CSV writers (RFC 4180, CRLF line ends, header first).
void write_monitors_csv(std::ostream& os, const Trajectory& traj);
void write_snapshots_csv(std::ostream& os, const Trajectory& traj,
                         const Grid& g);
void write_report_csv(std::ostream& os, const BlowupReport& r);
void write_summary_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_criteria_csv(std::ostream& os, const CriteriaReport& c);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep);

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_criteria(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_presets(std::ostream& out);

/// Full command-line entry point (subcommands run, sweep, criteria,
/// converge, presets).
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace blowup

#endif  // BLOWUP_COMMANDS_HPP
