#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "blowup/commands.hpp"

namespace blowup {
namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> sets;
  std::string preset;
  bool quiet = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "key=value config file");
  sub->add_option("--out", o.out_dir, "output directory");
  sub->add_option("--set", o.sets, "override KEY=VALUE (repeatable)");
  sub->add_option("--preset", o.preset, "experiment preset (see `presets`)");
  sub->add_flag("--quiet", o.quiet, "suppress the console summary");
}

std::string default_out_dir() {
  if (const char* env = std::getenv("BLOWUPLAB_OUT"); env && *env) return env;
  return "out";
}

RunConfig resolve(const CommonOptions& o, KeyValues extra) {
  KeyValues kv;
  if (!o.config_path.empty()) kv = load_key_values(o.config_path);
  if (!o.preset.empty()) kv["preset"] = o.preset;
  for (auto& [k, v] : extra) kv[k] = v;
  for (const auto& s : o.sets) apply_override(kv, s);
  RunConfig cfg = make_run_config(kv, default_out_dir());
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.quiet) cfg.quiet = true;
  return cfg;
}

std::string keys_help() {
  std::string s = "Config keys:";
  for (const auto& k : config_keys()) s += " " + k;
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "blowuplab: semidiscrete blow-up simulator for "
      "u_t = u_xx + |u|^p - b(x)|u_x|^q on (-1,1)"};
  app.footer(keys_help());
  app.require_subcommand(0, 1);

  CommonOptions run_o, sweep_o, crit_o, conv_o;
  auto* run = app.add_subcommand("run", "integrate one configuration");
  add_common(run, run_o);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep, sweep_o);
  std::string param;
  std::vector<std::string> values;
  sweep->add_option("--param", param, "b_const, q, p or N");
  sweep->add_option("--values", values, "comma-separated values")
      ->delimiter(',');
  auto* crit = app.add_subcommand("criteria", "check blow-up hypotheses");
  add_common(crit, crit_o);
  auto* conv = app.add_subcommand("converge", "grid convergence study");
  add_common(conv, conv_o);
  std::vector<std::string> n_list;
  std::string t_check;
  conv->add_option("--n-list", n_list, "comma-separated N values")
      ->delimiter(',');
  conv->add_option("--t-check", t_check, "comparison time");
  auto* list = app.add_subcommand("presets", "list experiment presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  auto usage = [&]() {
    err << app.help();
    return kExitUsage;
  };

  try {
    if (list->parsed()) return cmd_presets(out);
    if (run->parsed()) {
      const RunConfig cfg = resolve(run_o, {});
      if (!cfg.has_problem()) {
        err << "error: empty configuration\n" << run->help();
        return kExitUsage;
      }
      return cmd_run(cfg, out, err);
    }
    if (sweep->parsed()) {
      KeyValues extra;
      if (!param.empty()) extra["sweep_param"] = param;
      if (!values.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < values.size(); ++i) {
          joined += (i ? "," : "") + values[i];
        }
        extra["sweep_values"] = joined;
      }
      const RunConfig cfg = resolve(sweep_o, extra);
      if (!cfg.has_problem()) {
        err << "error: empty configuration\n" << sweep->help();
        return kExitUsage;
      }
      return cmd_sweep(cfg, out, err);
    }
    if (crit->parsed()) {
      const RunConfig cfg = resolve(crit_o, {});
      if (!cfg.has_problem()) {
        err << "error: empty configuration\n" << crit->help();
        return kExitUsage;
      }
      return cmd_criteria(cfg, out, err);
    }
    if (conv->parsed()) {
      KeyValues extra;
      if (!n_list.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < n_list.size(); ++i) {
          joined += (i ? "," : "") + n_list[i];
        }
        extra["N_list"] = joined;
      }
      if (!t_check.empty()) extra["t_check"] = t_check;
      const RunConfig cfg = resolve(conv_o, extra);
      if (!cfg.has_problem()) {
        err << "error: empty configuration\n" << conv->help();
        return kExitUsage;
      }
      return cmd_converge(cfg, out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return usage();
}

}  // namespace blowup
