#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fkpath/estimators.hpp"
#include "fkpath/model.hpp"

#include "json.hpp"

namespace fkpath {

// Canonical two-state test chain: rates 0->1 at 1, 1->0 at 2, potential
// V = (0, 1), everything time-constant. Most exact reference values in the
// test suites are derived for this model.
FiniteCtmcModel make_m2();

// Four-state ring: clockwise rate 1, counterclockwise rate 1/2, linear
// potential V(x) = x/3.
FiniteCtmcModel make_ring4();

// Two-state free-energy schedule family with H = (0, 1) and beta_t = rate*t^power.
ScheduleFamily make_two_state_schedule(double beta_rate = 1.0, double power = 1.0,
                                       double horizon = 1.0);

// One-dimensional torus diffusion with sine drift; approximate by
// construction (fixed Euler step).
TorusDiffusionModel make_torus1d(double drift_amplitude = 0.5, double diffusion_coeff = 0.7,
                                 double euler_step = 0.01);

struct BuiltinEntry {
  std::string name;
  std::string summary;
  double potential_sup = 0.0;
  nlohmann::json config_fragment;  // loads as a config "model" section
};

const std::vector<BuiltinEntry>& builtin_catalog();

}  // namespace fkpath
