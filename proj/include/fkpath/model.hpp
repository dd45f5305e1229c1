#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "fkpath/path.hpp"
#include "fkpath/rng.hpp"
#include "fkpath/state.hpp"

namespace fkpath {

// A time-inhomogeneous reference process X_t together with its bounded
// nonnegative potential V_t. Models are immutable after construction and safe
// to share across threads; every sampling call owns its RNG stream.
//
// potential() enforces 0 <= V_t(x) <= potential_sup and finiteness; the sup
// bound is user-declared and is what the jump samplers thin against, so a
// violation is a model error, not a clamp.
class Model {
 public:
  virtual ~Model() = default;

  virtual const StateSpace& space() const = 0;
  virtual double potential(double t, const State& x) const = 0;
  virtual double potential_sup() const = 0;
  virtual bool potential_time_constant() const = 0;

  // Exact realization of the V-free motion of X on [s, t] started at
  // `start`. Finite chains are sampled by Poisson thinning against the
  // declared rate_sup (no discretization bias); the torus diffusion is
  // Euler-Maruyama on its fixed step grid, recorded as a piecewise-constant
  // path, and is approximate by construction.
  virtual CadlagPath sample_free_motion(const State& start, double s, double t,
                                        Rng& rng) const = 0;

  virtual State sample_initial(const InitialLaw& law, Rng& rng) const = 0;

  // Stable content identifier used to key cached oracle outputs.
  virtual std::string describe() const = 0;
};

class FiniteCtmcModel final : public Model {
 public:
  using RateMatrixFn = std::function<Eigen::MatrixXd(double)>;
  using PotentialFn = std::function<double(double, int)>;

  // rate_fn(t) must return a generator matrix: nonnegative off-diagonals,
  // zero row sums, every exit rate bounded by rate_sup for all t.
  FiniteCtmcModel(StateSpace space, RateMatrixFn rate_fn, double rate_sup, PotentialFn potential_fn,
                  double potential_sup, bool potential_time_constant, bool rates_time_constant,
                  std::string description);

  const StateSpace& space() const override { return space_; }
  double potential(double t, const State& x) const override;
  double potential(double t, int x) const;
  double potential_sup() const override { return potential_sup_; }
  bool potential_time_constant() const override { return potential_time_constant_; }
  bool rates_time_constant() const { return rates_time_constant_; }
  double rate_sup() const { return rate_sup_; }
  int n_states() const { return space_.size; }

  // Validated generator matrix at time t.
  Eigen::MatrixXd rate_matrix(double t) const;

  CadlagPath sample_free_motion(const State& start, double s, double t, Rng& rng) const override;
  State sample_initial(const InitialLaw& law, Rng& rng) const override;
  std::string describe() const override { return description_; }

 private:
  StateSpace space_;
  RateMatrixFn rate_fn_;
  double rate_sup_;
  PotentialFn potential_fn_;
  double potential_sup_;
  bool potential_time_constant_;
  bool rates_time_constant_;
  std::string description_;
};

// Overdamped diffusion on the flat torus [0,1)^d, simulated by fixed-step
// Euler-Maruyama. A deliberately approximate stand-in kept for interface
// generality; it is excluded from the exact acceptance checks.
class TorusDiffusionModel final : public Model {
 public:
  using DriftFn = std::function<std::vector<double>(double, const TorusPoint&)>;
  using PotentialFn = std::function<double(double, const TorusPoint&)>;

  TorusDiffusionModel(StateSpace space, DriftFn drift_fn, double diffusion_coeff,
                      double euler_step, PotentialFn potential_fn, double potential_sup,
                      bool potential_time_constant, std::string description);

  const StateSpace& space() const override { return space_; }
  double potential(double t, const State& x) const override;
  double potential_sup() const override { return potential_sup_; }
  bool potential_time_constant() const override { return potential_time_constant_; }
  double euler_step() const { return euler_step_; }

  CadlagPath sample_free_motion(const State& start, double s, double t, Rng& rng) const override;
  State sample_initial(const InitialLaw& law, Rng& rng) const override;
  std::string describe() const override { return description_; }

 private:
  StateSpace space_;
  DriftFn drift_fn_;
  double diffusion_coeff_;
  double euler_step_;
  PotentialFn potential_fn_;
  double potential_sup_;
  bool potential_time_constant_;
  std::string description_;
};

}  // namespace fkpath
