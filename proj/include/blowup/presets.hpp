#ifndef BLOWUP_PRESETS_HPP
#define BLOWUP_PRESETS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "blowup/model.hpp"

namespace blowup {

/// Named experiment: initial data, coefficient and exponents.
struct Preset {
  std::string name;
  std::string figure;  // figure tag(s) it reproduces
  std::string description;
  double p = 3.0;
  double q = 1.3;
  std::string b;   // coefficient spec, see make_coefficient()
  std::string u0;  // initial-data shape, see make_initial_data()
  double u0_amplitude = 1e3;
};

const std::vector<Preset>& presets();

/// Throws std::invalid_argument for unknown names.
const Preset& find_preset(std::string_view name);

/// Coefficient b(x) from a spec string: a number (constant), "exp_neg_cube"
/// for exp(-x^3) or "exp_cube_1e3" for 1e3 exp(x^3).
std::function<double(double)> make_coefficient(const std::string& spec);

/// Initial data by shape name, scaled by `amplitude`:
///   "sine"     : sin(pi (x+1) / 2)
///   "poly_exp" : x^2 (1 - x^2) exp(x - 1)
std::function<double(double)> make_initial_data(const std::string& shape,
                                                double amplitude);

ProblemFamily family_of(const Preset& preset);

}  // namespace blowup

#endif  // BLOWUP_PRESETS_HPP
