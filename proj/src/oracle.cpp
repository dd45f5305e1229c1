#include "fkpath/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "fkpath/errors.hpp"

namespace fkpath {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dormand-Prince 5(4) embedded pair with a standard step controller.
// The systems here are tiny (n or n^2 entries, mild rates), so an explicit
// adaptive pair comfortably reaches 1e-12 tolerances.
class Dopri5 {
 public:
  using Rhs = std::function<VectorXd(double, const VectorXd&)>;

  static VectorXd integrate(const Rhs& rhs, VectorXd y, double t0, double t1, double rtol,
                            double atol, std::vector<double>* grid = nullptr) {
    const double span = t1 - t0;
    if (span == 0.0) return y;
    if (span < 0.0) throw std::invalid_argument("Dopri5: t1 < t0");
    if (grid) grid->push_back(t0);

    double t = t0;
    double h = span / 64.0;
    VectorXd k1 = rhs(t, y);
    long steps = 0;
    while (t < t1) {
      if (++steps > 2'000'000) throw NumericError("Dopri5: step budget exhausted");
      h = std::min(h, t1 - t);
      if (!(h > span * 1e-15)) throw NumericError("Dopri5: step-size underflow");

      const VectorXd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
      const VectorXd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const VectorXd k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const VectorXd k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const VectorXd k6 =
          rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const VectorXd k7 = rhs(t + h, y5);
      const VectorXd diff =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(diff[i]) / scale);
      }
      if (err <= 1.0) {
        t += h;
        y = y5;
        k1 = k7;  // first-same-as-last
        if (grid) grid->push_back(t);
      }
      const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::clamp(factor, 0.2, 5.0);
    }
    return y;
  }

 private:
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double d1 = 5179.0 / 57600, d3 = 7571.0 / 16695, d4 = 393.0 / 640,
                          d5 = -92097.0 / 339200, d6 = 187.0 / 2100, d7 = 1.0 / 40;
  static constexpr double e1 = b1 - d1, e3 = b3 - d3, e4 = b4 - d4, e5 = b5 - d5, e6 = b6 - d6,
                          e7 = -d7;
};

MatrixXd weighted_generator(const FiniteCtmcModel& model, double t) {
  MatrixXd a = model.rate_matrix(t);
  for (int x = 0; x < model.n_states(); ++x) a(x, x) -= model.potential(t, x);
  return a;
}

// Right-multiplication flow d/dt M = M * A(t) for a row-major flattened M.
VectorXd matrix_flow_rhs(const FiniteCtmcModel& model, bool weighted, double t,
                         const VectorXd& flat, int n) {
  const MatrixXd a = weighted ? weighted_generator(model, t) : model.rate_matrix(t);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      flat.data(), n, n);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dm = m * a;
  return Eigen::Map<VectorXd>(dm.data(), n * n);
}

MatrixXd solve_matrix_flow(const FiniteCtmcModel& model, bool weighted, double s, double t,
                           double rtol) {
  if (!(s <= t)) throw std::invalid_argument("semigroup needs s <= t");
  const int n = model.n_states();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> id =
      MatrixXd::Identity(n, n);
  VectorXd flat = Eigen::Map<VectorXd>(id.data(), n * n);
  flat = Dopri5::integrate(
      [&](double u, const VectorXd& y) { return matrix_flow_rhs(model, weighted, u, y, n); },
      std::move(flat), s, t, rtol, rtol * 1e-2);
  return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), n, n);
}

// Composite Simpson of fn over [0, t] on a doubling grid, Richardson
// extrapolated; fn is evaluated at every node of the finest grid only once.
double refined_simpson(const std::function<double(double)>& fn, double t, double rtol) {
  if (t == 0.0) return 0.0;
  int intervals = 8;
  std::vector<double> nodes(static_cast<std::size_t>(intervals) + 1);
  for (int k = 0; k <= intervals; ++k)
    nodes[static_cast<std::size_t>(k)] = fn(t * k / intervals);
  auto simpson = [&](const std::vector<double>& v) {
    const int m = static_cast<int>(v.size()) - 1;
    double acc = v.front() + v.back();
    for (int k = 1; k < m; ++k) acc += v[static_cast<std::size_t>(k)] * (k % 2 == 1 ? 4.0 : 2.0);
    return acc * t / (3.0 * m);
  };
  double prev = simpson(nodes);
  while (intervals < (1 << 16)) {
    intervals *= 2;
    std::vector<double> finer(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) {
      if (k % 2 == 0)
        finer[static_cast<std::size_t>(k)] = nodes[static_cast<std::size_t>(k / 2)];
      else
        finer[static_cast<std::size_t>(k)] = fn(t * k / intervals);
    }
    nodes = std::move(finer);
    const double cur = simpson(nodes);
    if (std::abs(cur - prev) <= rtol * (1.0 + std::abs(cur)))
      return cur + (cur - prev) / 15.0;
    prev = cur;
  }
  throw NumericError("refined_simpson: grid refinement did not converge");
}

}  // namespace

OracleSolution solve_gamma(const FiniteCtmcModel& model, const Eigen::VectorXd& gamma0, double t,
                           double rtol, bool cross_validate) {
  if (gamma0.size() != model.n_states())
    throw std::invalid_argument("solve_gamma: gamma0 has wrong dimension");
  if (gamma0.minCoeff() < 0.0) throw std::invalid_argument("solve_gamma: gamma0 must be >= 0");
  if (!(t >= 0.0)) throw std::invalid_argument("solve_gamma: t must be >= 0");

  OracleSolution sol;
  sol.gamma = Dopri5::integrate(
      [&](double u, const VectorXd& y) -> VectorXd {
        return weighted_generator(model, u).transpose() * y;
      },
      gamma0, 0.0, t, rtol, rtol * 1e-2, &sol.grid);

  if (cross_validate && model.rates_time_constant() && model.potential_time_constant() && t > 0.0) {
    // Independent route: scaling-and-squaring exponential of the frozen
    // generator. Both routes must agree before the solution is used.
    const MatrixXd expm = (t * weighted_generator(model, 0.0)).exp();
    const VectorXd via_expm = expm.transpose() * gamma0;
    const double diff = (via_expm - sol.gamma).cwiseAbs().maxCoeff();
    const double tol = std::max(1e-9, 100.0 * rtol) * std::max(1.0, gamma0.cwiseAbs().maxCoeff());
    if (diff > tol)
      throw NumericError("solve_gamma: integrator and matrix exponential disagree by " +
                         std::to_string(diff));
  }

  sol.z = sol.gamma.sum();
  if (!(sol.z > 0.0)) throw NumericError("solve_gamma: total mass is not positive");
  sol.eta = sol.gamma / sol.z;
  return sol;
}

Eigen::MatrixXd semigroup_matrix(const FiniteCtmcModel& model, double s, double t, double rtol) {
  return solve_matrix_flow(model, /*weighted=*/true, s, t, rtol);
}

Eigen::MatrixXd transition_matrix(const FiniteCtmcModel& model, double s, double t, double rtol) {
  return solve_matrix_flow(model, /*weighted=*/false, s, t, rtol);
}

double smoothing_integral(const FiniteCtmcModel& model, const Eigen::VectorXd& gamma0,
                          const std::function<double(double, int)>& g, double t, double rtol) {
  const int n = model.n_states();
  const OracleSolution at_horizon = solve_gamma(model, gamma0, t, 1e-12, false);

  // gamma_s (forward flow) and w_s = Q_{s,t}(1) (backward flow) evaluated at
  // arbitrary grid nodes by carrying the state between increasing queries.
  struct FlowCache {
    double time = 0.0;
    VectorXd value;
  };
  FlowCache fwd{0.0, gamma0};
  FlowCache bwd{0.0, VectorXd::Ones(n)};  // parameterized by u = t - s
  auto gamma_at = [&](double s) -> const VectorXd& {
    if (s < fwd.time) fwd = {0.0, gamma0};
    if (s > fwd.time) {
      fwd.value = Dopri5::integrate(
          [&](double u, const VectorXd& y) -> VectorXd {
            return weighted_generator(model, u).transpose() * y;
          },
          fwd.value, fwd.time, s, 1e-12, 1e-14);
      fwd.time = s;
    }
    return fwd.value;
  };
  auto w_at = [&](double s) -> const VectorXd& {
    const double u_target = t - s;
    if (u_target < bwd.time) bwd = {0.0, VectorXd::Ones(n)};
    if (u_target > bwd.time) {
      bwd.value = Dopri5::integrate(
          [&](double u, const VectorXd& y) -> VectorXd {
            return weighted_generator(model, t - u) * y;
          },
          bwd.value, bwd.time, u_target, 1e-12, 1e-14);
      bwd.time = u_target;
    }
    return bwd.value;
  };

  // The doubling grid revisits earlier times; rebuild the flows per sweep by
  // evaluating nodes in increasing order inside each refinement pass.
  int intervals = 8;
  auto sweep = [&](int m) {
    fwd = {0.0, gamma0};
    bwd = {0.0, VectorXd::Ones(n)};
    std::vector<double> h(static_cast<std::size_t>(m) + 1);
    std::vector<VectorXd> ws(static_cast<std::size_t>(m) + 1);
    for (int k = m; k >= 0; --k) ws[static_cast<std::size_t>(k)] = w_at(t * k / m);
    for (int k = 0; k <= m; ++k) {
      const double s = t * k / m;
      const VectorXd& gs = gamma_at(s);
      double val = 0.0;
      for (int x = 0; x < n; ++x) val += gs[x] * g(s, x) * ws[static_cast<std::size_t>(k)][x];
      h[static_cast<std::size_t>(k)] = val;
    }
    double acc = h.front() + h.back();
    for (int k = 1; k < m; ++k) acc += h[static_cast<std::size_t>(k)] * (k % 2 == 1 ? 4.0 : 2.0);
    return acc * t / (3.0 * m);
  };

  if (t == 0.0) return 0.0;
  double prev = sweep(intervals);
  while (intervals < (1 << 14)) {
    intervals *= 2;
    const double cur = sweep(intervals);
    if (std::abs(cur - prev) <= rtol * (1.0 + std::abs(cur)))
      return (cur + (cur - prev) / 15.0) / at_horizon.z;
    prev = cur;
  }
  throw NumericError("smoothing_integral: refinement did not converge");
}

double free_energy_identity_residual(const FiniteCtmcModel& model, const Eigen::VectorXd& gamma0,
                                     double t, double rtol) {
  const double total = gamma0.sum();
  if (!(total > 0.0)) throw std::invalid_argument("free energy check needs a probability gamma0");
  const OracleSolution sol = solve_gamma(model, gamma0 / total, t, 1e-12, false);

  struct FlowCache {
    double time = 0.0;
    VectorXd value;
  } fwd{0.0, gamma0 / total};
  auto eta_v = [&](double s) {
    if (s < fwd.time) fwd = {0.0, gamma0 / total};
    if (s > fwd.time) {
      fwd.value = Dopri5::integrate(
          [&](double u, const VectorXd& y) -> VectorXd {
            return weighted_generator(model, u).transpose() * y;
          },
          fwd.value, fwd.time, s, 1e-12, 1e-14);
      fwd.time = s;
    }
    double num = 0.0;
    for (int x = 0; x < model.n_states(); ++x) num += fwd.value[x] * model.potential(s, x);
    return num / fwd.value.sum();
  };
  // Node times increase within a refinement sweep; the cache rewinds to zero
  // whenever the next sweep queries an earlier time.
  const double work = refined_simpson(eta_v, t, rtol);
  return std::abs(std::exp(-work) - sol.z);
}

nlohmann::json oracle_to_json(const OracleSolution& sol, double t, const std::string& hash) {
  return {{"gamma", std::vector<double>(sol.gamma.data(), sol.gamma.data() + sol.gamma.size())},
          {"eta", std::vector<double>(sol.eta.data(), sol.eta.data() + sol.eta.size())},
          {"z", sol.z},
          {"t", t},
          {"model_hash", hash}};
}

std::string model_hash(const Model& model) {
  const std::string desc = model.describe();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : desc) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace fkpath
