#include "fkpath/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "fkpath/errors.hpp"
#include "fkpath/oracle.hpp"

namespace fkpath {

double check_h0_doeblin(const FiniteCtmcModel& model, double t, double h, double rtol) {
  if (!(h > 0.0)) throw std::invalid_argument("check_h0_doeblin needs h > 0");
  Eigen::MatrixXd p = transition_matrix(model, t, t + h, rtol);
  const int n = model.n_states();
  // The integrator can leave |entries| ~ rtol below zero; they are true zeros.
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (p(x, y) < 0.0 && p(x, y) > -1e-12) p(x, y) = 0.0;

  const Eigen::VectorXd mu = p.colwise().mean();
  for (int y = 0; y < n; ++y)
    if (mu[y] == 0.0) return 0.0;

  double rho = 1.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (p(x, y) <= 0.0) return 0.0;
      rho = std::min(rho, std::min(p(x, y) / mu[y], mu[y] / p(x, y)));
    }
  }
  return rho;
}

double check_h2_q(const FiniteCtmcModel& model, double s, double t, double rtol) {
  if (!(s <= t)) throw std::invalid_argument("check_h2_q needs s <= t");
  const Eigen::MatrixXd q = semigroup_matrix(model, s, t, rtol);
  const Eigen::VectorXd mass = q.rowwise().sum();
  const int n = model.n_states();
  for (int y = 0; y < n; ++y)
    if (!(mass[y] > 0.0)) throw NumericError("check_h2_q: degenerate semigroup, Q(1) vanishes");

  double worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) worst = std::max(worst, std::log(mass[x] / mass[y]));
  return worst;
}

}  // namespace fkpath
