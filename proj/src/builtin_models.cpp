#include "fkpath/builtin_models.hpp"

#include <cmath>
#include <numbers>

namespace fkpath {

FiniteCtmcModel make_m2() {
  Eigen::MatrixXd rates(2, 2);
  rates << -1.0, 1.0, 2.0, -2.0;
  return FiniteCtmcModel(
      StateSpace::finite(2), [rates](double) { return rates; }, /*rate_sup=*/2.0,
      [](double, int x) { return x == 1 ? 1.0 : 0.0; }, /*potential_sup=*/1.0,
      /*potential_time_constant=*/true, /*rates_time_constant=*/true, "m2");
}

FiniteCtmcModel make_ring4() {
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(4, 4);
  for (int x = 0; x < 4; ++x) {
    rates(x, (x + 1) % 4) = 1.0;
    rates(x, (x + 3) % 4) = 0.5;
    rates(x, x) = -1.5;
  }
  return FiniteCtmcModel(
      StateSpace::finite(4), [rates](double) { return rates; }, /*rate_sup=*/1.5,
      [](double, int x) { return static_cast<double>(x) / 3.0; }, /*potential_sup=*/1.0,
      /*potential_time_constant=*/true, /*rates_time_constant=*/true, "ring4");
}

ScheduleFamily make_two_state_schedule(double beta_rate, double power, double horizon) {
  if (!(beta_rate >= 0.0) || !(power >= 1.0))
    throw std::invalid_argument("schedule needs beta_rate >= 0 and power >= 1");
  ScheduleFamily family;
  family.energy = {0.0, 1.0};
  family.beta = [beta_rate, power](double t) { return beta_rate * std::pow(t, power); };
  family.beta_derivative = [beta_rate, power](double t) {
    return power == 1.0 ? beta_rate : beta_rate * power * std::pow(t, power - 1.0);
  };
  family.beta_derivative_sup =
      power == 1.0 ? beta_rate : beta_rate * power * std::pow(horizon, power - 1.0);
  family.time_constant_potential = (power == 1.0);
  family.description = "two-state-schedule rate=" + std::to_string(beta_rate) +
                       " power=" + std::to_string(power);
  return family;
}

TorusDiffusionModel make_torus1d(double drift_amplitude, double diffusion_coeff,
                                 double euler_step) {
  const double two_pi = 2.0 * std::numbers::pi;
  return TorusDiffusionModel(
      StateSpace::torus(1),
      [drift_amplitude, two_pi](double, const TorusPoint& x) {
        return std::vector<double>{-drift_amplitude * std::sin(two_pi * x[0])};
      },
      diffusion_coeff, euler_step,
      [two_pi](double, const TorusPoint& x) { return 0.5 * (1.0 - std::cos(two_pi * x[0])); },
      /*potential_sup=*/1.0, /*potential_time_constant=*/true,
      "torus1d amp=" + std::to_string(drift_amplitude));
}

const std::vector<BuiltinEntry>& builtin_catalog() {
  static const std::vector<BuiltinEntry> catalog = {
      {"m2",
       "two-state chain, rates 0->1: 1, 1->0: 2, potential (0, 1); the canonical exact-reference "
       "model",
       1.0,
       {{"builtin", "m2"}}},
      {"ring4",
       "four-state ring, clockwise rate 1, counterclockwise 1/2, linear potential x/3",
       1.0,
       {{"builtin", "ring4"}}},
      {"jarzynski2",
       "two-state free-energy schedule family, H = (0, 1), beta_t = beta_rate * t^power, "
       "Metropolis base dynamics",
       1.0,
       {{"builtin", "jarzynski2"}, {"beta_rate", 1.0}, {"power", 1.0}}},
      {"torus1d",
       "overdamped sine-drift diffusion on the circle, fixed-step Euler-Maruyama "
       "(approximate; excluded from exact checks)",
       1.0,
       {{"builtin", "torus1d"},
        {"drift_amplitude", 0.5},
        {"diffusion_coeff", 0.7},
        {"euler_step", 0.01}}},
  };
  return catalog;
}

}  // namespace fkpath
