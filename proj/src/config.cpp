#include "blowup/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blowup/presets.hpp"

namespace blowup {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = first + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* first = v.data();
  const char* last = first + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw std::invalid_argument("--set expects KEY=VALUE, got '" + assignment +
                                "'");
  }
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "preset",        "p",
      "q",             "b",
      "u0",            "u0_amplitude",
      "N",             "rel_tol",
      "abs_tol",       "dt_init",
      "dt_min",        "t_max",
      "threshold",     "snapshot_times",
      "snapshot_stride", "monitor_stride",
      "out",           "prefix",
      "t_check",       "N_list",
      "sweep_param",   "sweep_values",
      "quiet"};
  return keys;
}

ProblemFamily RunConfig::family() const {
  if (u0.empty()) {
    throw std::invalid_argument("no problem configured: set preset or u0");
  }
  return ProblemFamily{p, q, make_coefficient(b),
                       make_initial_data(u0, u0_amplitude)};
}

RunConfig make_run_config(const KeyValues& kv, const std::string& default_out) {
  const auto& keys = config_keys();
  for (const auto& [key, value] : kv) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  RunConfig cfg;
  cfg.out_dir = default_out;
  if (auto it = kv.find("preset"); it != kv.end() && !it->second.empty()) {
    const Preset& pr = find_preset(it->second);
    cfg.preset = it->second;
    cfg.p = pr.p;
    cfg.q = pr.q;
    cfg.b = pr.b;
    cfg.u0 = pr.u0;
    cfg.u0_amplitude = pr.u0_amplitude;
  }
  for (const auto& [key, v] : kv) {
    if (key == "preset") continue;
    if (key == "p") cfg.p = to_double(key, v);
    else if (key == "q") cfg.q = to_double(key, v);
    else if (key == "b") cfg.b = v;
    else if (key == "u0") cfg.u0 = v;
    else if (key == "u0_amplitude") cfg.u0_amplitude = to_double(key, v);
    else if (key == "N") cfg.n = to_integer(key, v);
    else if (key == "rel_tol") cfg.integrator.rel_tol = to_double(key, v);
    else if (key == "abs_tol") cfg.integrator.abs_tol = to_double(key, v);
    else if (key == "dt_init") cfg.integrator.dt_init = to_double(key, v);
    else if (key == "dt_min") cfg.integrator.dt_min = to_double(key, v);
    else if (key == "t_max") cfg.integrator.t_max = to_double(key, v);
    else if (key == "threshold") cfg.integrator.blowup_threshold = to_double(key, v);
    else if (key == "snapshot_times") {
      cfg.integrator.snapshot_times.clear();
      for (const auto& s : split_list(v)) {
        cfg.integrator.snapshot_times.push_back(to_double(key, s));
      }
    } else if (key == "snapshot_stride") {
      cfg.integrator.snapshot_stride = to_integer(key, v);
    } else if (key == "monitor_stride") {
      cfg.integrator.monitor_stride = to_integer(key, v);
    } else if (key == "out") cfg.out_dir = v;
    else if (key == "prefix") cfg.prefix = v;
    else if (key == "t_check") cfg.t_check = to_double(key, v);
    else if (key == "N_list") {
      cfg.n_list.clear();
      for (const auto& s : split_list(v)) {
        cfg.n_list.push_back(to_integer(key, s));
      }
    } else if (key == "sweep_param") cfg.sweep_param = v;
    else if (key == "sweep_values") cfg.sweep_values = split_list(v);
    else if (key == "quiet") cfg.quiet = to_bool(key, v);
  }
  if (cfg.n < 1) throw std::invalid_argument("N must be >= 1");
  cfg.integrator.validate();
  return cfg;
}

std::string to_key_values(const RunConfig& cfg) {
  std::ostringstream os;
  auto line = [&os](const char* k, const std::string& v) {
    os << k << " = " << v << '\n';
  };
  if (!cfg.preset.empty()) line("preset", cfg.preset);
  line("p", format_number(cfg.p));
  line("q", format_number(cfg.q));
  line("b", cfg.b);
  line("u0", cfg.u0);
  line("u0_amplitude", format_number(cfg.u0_amplitude));
  line("N", std::to_string(cfg.n));
  const auto& ic = cfg.integrator;
  line("rel_tol", format_number(ic.rel_tol));
  line("abs_tol", format_number(ic.abs_tol));
  line("dt_init", format_number(ic.dt_init));
  line("dt_min", format_number(ic.dt_min));
  line("t_max", format_number(ic.t_max));
  line("threshold", format_number(ic.blowup_threshold));
  std::string snaps;
  for (std::size_t i = 0; i < ic.snapshot_times.size(); ++i) {
    snaps += (i ? "," : "") + format_number(ic.snapshot_times[i]);
  }
  line("snapshot_times", snaps);
  line("snapshot_stride", std::to_string(ic.snapshot_stride));
  line("monitor_stride", std::to_string(ic.monitor_stride));
  return os.str();
}

}  // namespace blowup
