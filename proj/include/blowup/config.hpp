#ifndef BLOWUP_CONFIG_HPP
#define BLOWUP_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "blowup/integrator.hpp"
#include "blowup/model.hpp"

namespace blowup {

/// Ordered key=value pairs; later assignments win.
using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines. Blank lines and lines starting with '#' are
/// skipped. Throws std::invalid_argument with the line number on bad input.
KeyValues parse_key_values(const std::string& text);

/// Reads and parses a config file.
KeyValues load_key_values(const std::string& path);

/// Applies one "KEY=VALUE" override.
void apply_override(KeyValues& kv, const std::string& assignment);

struct RunConfig {
  // problem
  std::string preset;
  double p = 3.0;
  double q = 1.3;
  std::string b = "1";
  std::string u0;  // shape name; empty means "not configured"
  double u0_amplitude = 1e3;
  Eigen::Index n = 201;

  IntegratorConfig integrator;

  // output
  std::string out_dir = "out";
  std::string prefix;

  // converge
  double t_check = 0.05;
  std::vector<Eigen::Index> n_list{25, 50, 100};

  // sweep
  std::string sweep_param;
  std::vector<std::string> sweep_values;

  bool quiet = false;

  bool has_problem() const { return !u0.empty(); }
  ProblemFamily family() const;
};

/// Builds a RunConfig: preset defaults first (when `preset` is set), then
/// every other key. Unknown keys are rejected. `default_out` seeds out_dir.
RunConfig make_run_config(const KeyValues& kv,
                          const std::string& default_out = "out");

/// Every key accepted by make_run_config(), for usage text.
const std::vector<std::string>& config_keys();

/// Writes the config back out as key=value lines.
std::string to_key_values(const RunConfig& cfg);

}  // namespace blowup

#endif  // BLOWUP_CONFIG_HPP
