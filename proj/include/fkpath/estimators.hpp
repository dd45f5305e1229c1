#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fkpath/conditional_dual.hpp"
#include "fkpath/mean_field.hpp"
#include "fkpath/oracle.hpp"
#include "fkpath/stats.hpp"

namespace fkpath {

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_replicas = 0;
  std::uint64_t seed = 0;
};

// Functional of (distinguished ancestral line, remaining lines). Evaluable on
// both sides of the two-system comparison: on the interacting side the
// distinguished line is a uniform draw from the genealogy, on the conditional
// side it is the frozen free-motion path. Must be symmetric in `others`.
struct PairedFunctional {
  std::string name;
  std::function<double(const CadlagPath& distinguished, std::span<const CadlagPath> others)> eval;
  std::optional<double> oracle_value;  // known weighted expectation, when available
};

struct DualityRow {
  std::string name;
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  double combined_se = 0.0;
  double z = 0.0;
  std::optional<double> oracle_value;
  std::optional<double> z_lhs_oracle;
  std::optional<double> z_rhs_oracle;
};

struct DualityReport {
  std::vector<DualityRow> rows;
  int replicas = 0;
  std::uint64_t seed = 0;
};

// Two-sided comparison of the weighted genealogy statistics against the
// conditional-system statistics with a fresh free-motion path frozen in:
//   lhs = E[F(sampled line, others) * exp(-int m(xi_s)(V_s) ds)]
//   rhs = E[F(free path, free lines) * exp(-int V_s(X_s) ds)]
// Equality is exact in law; each row reports the two-sample z score.
DualityReport duality_check(const Model& model, int n, double t,
                            const std::vector<PairedFunctional>& functionals, int replicas,
                            const InitialLaw& init, std::uint64_t seed, int threads = 0);

// The documented 12-functional battery for a finite model, with oracle values
// filled in where the weighted expectation reduces to the exact solver. The
// returned closures reference `model`, which must outlive them.
std::vector<PairedFunctional> standard_duality_battery(const FiniteCtmcModel& model, double t,
                                                       const Eigen::VectorXd& gamma0);

// Unnormalized weighted estimator E[m(xi_t)(f) * Z_t(xi)] over independent
// replicas; unbiased for gamma_t(f).
MonteCarloEstimate estimate_gamma(const Model& model, int n, double t, const PathFunctional& f,
                                  int replicas, const InitialLaw& init, std::uint64_t seed,
                                  int threads = 0);

struct BiasRow {
  int n = 0;
  double bias = 0.0;  // mean m(xi_t)(f) - eta_t(f)
  double se = 0.0;
};

// Systematic error of the unweighted occupation measure against the exact
// normalized law, per system size.
std::vector<BiasRow> bias_sweep(const FiniteCtmcModel& model, double t, const PathFunctional& f,
                                std::function<double(const Eigen::VectorXd&)> eta_statistic,
                                const Eigen::VectorXd& gamma0, std::span<const int> n_list,
                                int replicas, const InitialLaw& init, std::uint64_t seed,
                                int threads = 0);

// Free-energy schedule experiment on a finite chain: a base dynamics
// reversible under the Boltzmann family pi_beta, an increasing schedule
// beta_t, and the work potential V_t = beta'_t H. The particle estimator of
// the partition ratio is checked against the closed form and the two oracle
// routes against each other.
struct ScheduleFamily {
  std::vector<double> energy;                  // H per state
  std::function<double(double)> beta;          // schedule, increasing
  std::function<double(double)> beta_derivative;
  double beta_derivative_sup = 1.0;            // bound on beta' over [0, horizon]
  bool time_constant_potential = false;        // true when beta' is constant
  std::string description = "schedule-family";
  // Base dynamics at a frozen inverse temperature; defaults to Metropolis
  // rates on the complete graph. Must leave pi_beta invariant.
  std::function<Eigen::MatrixXd(double beta)> base_rates;
  double rate_sup = 1.0;  // exit-rate bound of the base dynamics
};

// Builds the time-inhomogeneous chain X_t = Y^{beta_t} with Metropolis rates
// (reversible for pi_beta at every frozen beta) and potential beta'_t H.
// Throws ModelError when the base dynamics fails pi_beta L_beta = 0 to 1e-10.
FiniteCtmcModel make_schedule_model(const ScheduleFamily& family, double horizon);

struct FreeEnergyResult {
  MonteCarloEstimate particle;   // mean of exp(-int m(xi_s)(V_s) ds)
  double exact_ratio = 0.0;      // sum e^{-beta_t H} / sum e^{-beta_0 H}
  double oracle_z = 0.0;         // solver Z_t
  double identity_residual = 0.0;
  double z = 0.0;                // (particle - exact) / SE
};

FreeEnergyResult free_energy_experiment(const ScheduleFamily& family, double t, int n,
                                        int replicas, std::uint64_t seed, int threads = 0);

}  // namespace fkpath
