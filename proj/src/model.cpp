#include "fkpath/model.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "fkpath/errors.hpp"

namespace fkpath {

namespace {

constexpr double kRateSlack = 1e-9;  // tolerance on user-declared sup bounds

}  // namespace

FiniteCtmcModel::FiniteCtmcModel(StateSpace space, RateMatrixFn rate_fn, double rate_sup,
                                 PotentialFn potential_fn, double potential_sup,
                                 bool potential_time_constant, bool rates_time_constant,
                                 std::string description)
    : space_(space),
      rate_fn_(std::move(rate_fn)),
      rate_sup_(rate_sup),
      potential_fn_(std::move(potential_fn)),
      potential_sup_(potential_sup),
      potential_time_constant_(potential_time_constant),
      rates_time_constant_(rates_time_constant),
      description_(std::move(description)) {
  if (space_.kind != StateSpace::Kind::finite)
    throw std::invalid_argument("FiniteCtmcModel needs a finite state space");
  if (!(rate_sup_ >= 0.0) || !(potential_sup_ >= 0.0))
    throw std::invalid_argument("sup bounds must be nonnegative");
}

double FiniteCtmcModel::potential(double t, int x) const {
  const double v = potential_fn_(t, x);
  if (!std::isfinite(v)) throw ModelError("potential evaluated to nonfinite value");
  if (v < 0.0 || v > potential_sup_ + kRateSlack)
    throw ModelError("potential " + std::to_string(v) + " outside [0, potential_sup] at t=" +
                     std::to_string(t) + ", x=" + std::to_string(x));
  return v;
}

double FiniteCtmcModel::potential(double t, const State& x) const {
  return potential(t, state_index(x));
}

Eigen::MatrixXd FiniteCtmcModel::rate_matrix(double t) const {
  Eigen::MatrixXd rates = rate_fn_(t);
  const int n = space_.size;
  if (rates.rows() != n || rates.cols() != n)
    throw ModelError("rate matrix has wrong dimensions");
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    double exit = 0.0;
    for (int j = 0; j < n; ++j) {
      const double r = rates(i, j);
      if (!std::isfinite(r)) throw ModelError("rate matrix entry is nonfinite");
      if (i != j) {
        if (r < 0.0) throw ModelError("negative off-diagonal rate");
        exit += r;
      }
      row_sum += r;
    }
    if (std::abs(row_sum) > 1e-10 * std::max(1.0, exit))
      throw ModelError("rate matrix row does not sum to zero");
    if (exit > rate_sup_ + kRateSlack)
      throw ModelError("exit rate " + std::to_string(exit) + " exceeds declared rate_sup " +
                       std::to_string(rate_sup_));
  }
  return rates;
}

CadlagPath FiniteCtmcModel::sample_free_motion(const State& start, double s, double t,
                                               Rng& rng) const {
  if (!(s <= t)) throw std::invalid_argument("sample_free_motion needs s <= t");
  if (!space_.contains(start)) throw std::invalid_argument("start state outside state space");

  CadlagPath path(s, s, start);
  int x = state_index(start);
  if (rate_sup_ > 0.0) {
    // Thinning against the global exit-rate bound: candidate times from a
    // Poisson(rate_sup) clock, accepted with the true exit rate at the
    // candidate time. Exact for bounded time-dependent rates.
    double tau = s;
    while (true) {
      tau += rng.exponential(rate_sup_);
      if (tau >= t) break;
      const Eigen::MatrixXd rates = rate_matrix(tau);
      const double exit = -rates(x, x);
      if (rng.uniform() * rate_sup_ < exit) {
        double u = rng.uniform() * exit;
        int y = -1;
        for (int j = 0; j < space_.size; ++j) {
          if (j == x) continue;
          u -= rates(x, j);
          if (u < 0.0) {
            y = j;
            break;
          }
        }
        if (y < 0) {  // guard against accumulated rounding in the scan
          for (int j = space_.size - 1; j >= 0; --j)
            if (j != x && rates(x, j) > 0.0) {
              y = j;
              break;
            }
        }
        path.record(tau, y);
        x = y;
      }
    }
  }
  path.extend_to(t);
  return path;
}

State FiniteCtmcModel::sample_initial(const InitialLaw& law, Rng& rng) const {
  switch (law.kind) {
    case InitialLaw::Kind::dirac:
      if (!space_.contains(law.atom)) throw std::invalid_argument("dirac atom outside state space");
      return law.atom;
    case InitialLaw::Kind::categorical: {
      if (static_cast<int>(law.weights.size()) != space_.size)
        throw std::invalid_argument("categorical weights size mismatch");
      double u = rng.uniform();
      for (int j = 0; j < space_.size; ++j) {
        u -= law.weights[static_cast<std::size_t>(j)];
        if (u < 0.0) return j;
      }
      return space_.size - 1;
    }
    case InitialLaw::Kind::uniform:
      return rng.index_below(space_.size);
  }
  throw std::invalid_argument("unknown initial law");
}

TorusDiffusionModel::TorusDiffusionModel(StateSpace space, DriftFn drift_fn,
                                         double diffusion_coeff, double euler_step,
                                         PotentialFn potential_fn, double potential_sup,
                                         bool potential_time_constant, std::string description)
    : space_(space),
      drift_fn_(std::move(drift_fn)),
      diffusion_coeff_(diffusion_coeff),
      euler_step_(euler_step),
      potential_fn_(std::move(potential_fn)),
      potential_sup_(potential_sup),
      potential_time_constant_(potential_time_constant),
      description_(std::move(description)) {
  if (space_.kind != StateSpace::Kind::torus)
    throw std::invalid_argument("TorusDiffusionModel needs a torus state space");
  if (!(euler_step_ > 0.0)) throw std::invalid_argument("euler_step must be positive");
  if (!(diffusion_coeff_ > 0.0)) throw std::invalid_argument("diffusion_coeff must be positive");
}

double TorusDiffusionModel::potential(double t, const State& x) const {
  const double v = potential_fn_(t, state_point(x));
  if (!std::isfinite(v)) throw ModelError("potential evaluated to nonfinite value");
  if (v < 0.0 || v > potential_sup_ + kRateSlack)
    throw ModelError("potential outside [0, potential_sup]");
  return v;
}

CadlagPath TorusDiffusionModel::sample_free_motion(const State& start, double s, double t,
                                                   Rng& rng) const {
  if (!(s <= t)) throw std::invalid_argument("sample_free_motion needs s <= t");
  if (!space_.contains(start)) throw std::invalid_argument("start state outside state space");

  CadlagPath path(s, s, start);
  TorusPoint x = state_point(start);
  // Index-based grid: node times s + k * step clamped to t, so accumulated
  // rounding can neither stall the loop nor step past the horizon.
  double prev = s;
  for (long k = 1; prev < t; ++k) {
    const double node = std::min(s + static_cast<double>(k) * euler_step_, t);
    const double h = node - prev;
    if (!(h > 0.0)) break;
    const std::vector<double> drift = drift_fn_(prev, x);
    if (static_cast<int>(drift.size()) != space_.dimension)
      throw ModelError("drift has wrong dimension");
    const double vol = diffusion_coeff_ * std::sqrt(h);
    for (int d = 0; d < space_.dimension; ++d) {
      const double b = drift[static_cast<std::size_t>(d)];
      if (!std::isfinite(b)) throw ModelError("drift evaluated to nonfinite value");
      double c = x[static_cast<std::size_t>(d)] + b * h + vol * rng.normal();
      c -= std::floor(c);  // wrap to [0,1)
      x[static_cast<std::size_t>(d)] = c;
    }
    path.record(node, x);
    prev = node;
  }
  path.extend_to(t);
  return path;
}

State TorusDiffusionModel::sample_initial(const InitialLaw& law, Rng& rng) const {
  switch (law.kind) {
    case InitialLaw::Kind::dirac:
      if (!space_.contains(law.atom)) throw std::invalid_argument("dirac atom outside state space");
      return law.atom;
    case InitialLaw::Kind::uniform: {
      TorusPoint x(static_cast<std::size_t>(space_.dimension));
      for (double& c : x) c = rng.uniform();
      return x;
    }
    case InitialLaw::Kind::categorical:
      throw std::invalid_argument("categorical initial law undefined on the torus");
  }
  throw std::invalid_argument("unknown initial law");
}

}  // namespace fkpath
