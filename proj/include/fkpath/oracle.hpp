#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fkpath/model.hpp"

#include "json.hpp"

namespace fkpath {

// Exact finite-state solver for the weighted flow
//
//   d/dt gamma_t = gamma_t (L_t - diag(V_t)),   eta_t = gamma_t / gamma_t(1),
//
// integrated with an adaptive embedded Runge-Kutta pair. For models with
// time-constant rates and potential the result is cross-checked against an
// independent scaling-and-squaring matrix exponential; the two routes must
// agree to 1e-9 before the solution is handed out, so the solver validates
// itself before it grounds any Monte Carlo comparison.
struct OracleSolution {
  Eigen::VectorXd gamma;     // unnormalized weighted law at the horizon
  Eigen::VectorXd eta;      // gamma / z
  double z = 1.0;            // gamma_t(1)
  std::vector<double> grid;  // accepted integrator times
};

OracleSolution solve_gamma(const FiniteCtmcModel& model, const Eigen::VectorXd& gamma0, double t,
                           double rtol = 1e-10, bool cross_validate = true);

// Weighted semigroup matrix Q_{s,t}(x, y) solving d/dt Q = Q (L_t - diag V_t),
// Q_{s,s} = I. Satisfies Q_{s,u} Q_{u,t} = Q_{s,t} up to integrator tolerance.
Eigen::MatrixXd semigroup_matrix(const FiniteCtmcModel& model, double s, double t,
                                 double rtol = 1e-10);

// Plain transition matrix P_{s,t} of the reference chain (potential ignored).
Eigen::MatrixXd transition_matrix(const FiniteCtmcModel& model, double s, double t,
                                  double rtol = 1e-10);

// Exact smoothing value (1/Z_t) * int_0^t gamma_s(g_s .* Q_{s,t}(1)) ds, the
// expectation of int_0^t g(s, X_s) ds under the weighted path law. Composite
// Simpson on a refined grid with Richardson extrapolation.
double smoothing_integral(const FiniteCtmcModel& model, const Eigen::VectorXd& gamma0,
                          const std::function<double(double, int)>& g, double t,
                          double rtol = 1e-8);

// Residual |Z_t - exp(-int_0^t eta_s(V_s) ds)| between the two independent
// routes to the normalizing constant.
double free_energy_identity_residual(const FiniteCtmcModel& model, const Eigen::VectorXd& gamma0,
                                     double t, double rtol = 1e-10);

// Cache/export record {gamma, eta, z, t, model_hash}.
nlohmann::json oracle_to_json(const OracleSolution& sol, double t, const std::string& model_hash);

// FNV-1a content hash of a model description, for keying cached oracles.
std::string model_hash(const Model& model);

}  // namespace fkpath
