#include "blowup/presets.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace blowup {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    const std::string sym = "symmetric 1e3 sin(pi(x+1)/2)";
    std::vector<Preset> v;
    auto add = [&v](std::string name, std::string fig, std::string desc,
                    double q, std::string b, std::string u0,
                    double amp = 1e3) {
      v.push_back(Preset{std::move(name), std::move(fig), std::move(desc), 3.0,
                         q, std::move(b), std::move(u0), amp});
    };
    add("fig2", "fig1-3", "nonsymmetric 1e3 x^2(1-x^2)e^{x-1}, q=1.3, b=1", 1.3,
        "1", "poly_exp");
    add("fig5", "fig4-6", sym + ", q=1.3, b=1", 1.3, "1", "sine");
    add("fig7", "fig7", sym + ", q=1.5, b=1", 1.5, "1", "sine");
    add("fig8", "fig8", sym + ", q=1.3, b=1", 1.3, "1", "sine");
    add("fig9", "fig9", sym + ", q=1.3, b=10", 1.3, "10", "sine");
    add("fig10", "fig10", sym + ", q=1.3, b=100", 1.3, "100", "sine");
    add("fig11", "fig11", sym + ", q=1.3, b=1000", 1.3, "1000", "sine");
    add("fig12", "fig12", sym + ", q=1.5, b=1", 1.5, "1", "sine");
    add("fig13", "fig13", sym + ", q=1.5, b=1.48", 1.5, "1.48", "sine");
    add("fig14", "fig14", sym + ", q=1.5, b=1.49", 1.5, "1.49", "sine");
    add("fig15", "fig15", sym + ", q=1.5, b=exp(-x^3)", 1.5, "exp_neg_cube",
        "sine");
    add("fig16", "fig16", sym + ", q=1.5, b=1e3 exp(x^3)", 1.5,
        "exp_cube_1e3", "sine");
    add("smooth", "-", "small sin(pi(x+1)/2), q=1.3, b=1; decays, no blow-up",
        1.3, "1", "sine", 1.0);
    return v;
  }();
  return all;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  // Aliases: fig1/fig3 share fig2's data, fig4/fig6 share fig5's.
  if (name == "fig1" || name == "fig3") return find_preset("fig2");
  if (name == "fig4" || name == "fig6") return find_preset("fig5");
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::function<double(double)> make_coefficient(const std::string& spec) {
  if (spec == "exp_neg_cube") {
    return [](double x) { return std::exp(-x * x * x); };
  }
  if (spec == "exp_cube_1e3") {
    return [](double x) { return 1e3 * std::exp(x * x * x); };
  }
  double value = 0.0;
  const char* first = spec.data();
  const char* last = first + spec.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value) ||
      value < 0.0) {
    throw std::invalid_argument(
        "b must be a nonnegative number, exp_neg_cube or exp_cube_1e3; got '" +
        spec + "'");
  }
  return [value](double) { return value; };
}

std::function<double(double)> make_initial_data(const std::string& shape,
                                                double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("u0_amplitude must be finite and >= 0");
  }
  if (shape == "sine") {
    return [amplitude](double x) {
      return amplitude * std::sin(0.5 * std::numbers::pi * (x + 1.0));
    };
  }
  if (shape == "poly_exp") {
    return [amplitude](double x) {
      return amplitude * x * x * (1.0 - x * x) * std::exp(x - 1.0);
    };
  }
  throw std::invalid_argument("unknown u0 shape '" + shape +
                              "' (expected sine or poly_exp)");
}

ProblemFamily family_of(const Preset& preset) {
  return ProblemFamily{preset.p, preset.q, make_coefficient(preset.b),
                       make_initial_data(preset.u0, preset.u0_amplitude)};
}

}  // namespace blowup
