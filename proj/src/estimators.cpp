#include "fkpath/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fkpath/errors.hpp"
#include "fkpath/parallel.hpp"

namespace fkpath {

namespace {

Summary summarize_or_throw(const std::vector<double>& xs) {
  const Summary s = summarize(xs);
  if (!std::isfinite(s.mean)) throw NumericError("estimator mean is nonfinite");
  return s;
}

double eval_paired(const std::vector<PairedFunctional>& fs, int idx, const CadlagPath& dist,
                   std::span<const CadlagPath> others) {
  try {
    return fs[static_cast<std::size_t>(idx)].eval(dist, others);
  } catch (const std::exception& e) {
    throw FunctionalError(idx, e.what());
  }
}

}  // namespace

DualityReport duality_check(const Model& model, int n, double t,
                            const std::vector<PairedFunctional>& functionals, int replicas,
                            const InitialLaw& init, std::uint64_t seed, int threads) {
  if (replicas < 100) throw std::invalid_argument("duality_check: need at least 100 replicas");
  const int nf = static_cast<int>(functionals.size());
  const int workers = resolve_thread_count(threads);

  // Substreams 0 and 1 of the master seed feed the two sides; each replica
  // derives its own stream below them.
  const std::uint64_t lhs_master = derive_seed(seed, 0);
  const std::uint64_t rhs_master = derive_seed(seed, 1);

  // Interacting side: weight exp(-int m(xi_s)(V_s) ds) against a uniformly
  // distinguished ancestral line.
  auto lhs_rows = replica_map<std::vector<double>>(replicas, workers, [&](int r) {
    Rng rng(derive_seed(lhs_master, static_cast<std::uint64_t>(r)));
    GenealogySystem sys = simulate_mean_field(model, n, t, init, rng);
    const double weight = many_body_weight(sys);
    const int pick = rng.index_below(n);
    std::swap(sys.lines[static_cast<std::size_t>(pick)], sys.lines[static_cast<std::size_t>(n - 1)]);
    const CadlagPath& distinguished = sys.lines[static_cast<std::size_t>(n - 1)];
    const std::span<const CadlagPath> others(sys.lines.data(), static_cast<std::size_t>(n - 1));
    std::vector<double> row(static_cast<std::size_t>(nf));
    for (int k = 0; k < nf; ++k)
      row[static_cast<std::size_t>(k)] = weight * eval_paired(functionals, k, distinguished, others);
    return row;
  });

  // Conditional side: a fresh free-motion path carrying its own exponential
  // weight, frozen into the dual system.
  auto rhs_rows = replica_map<std::vector<double>>(replicas, workers, [&](int r) {
    Rng rng(derive_seed(rhs_master, static_cast<std::uint64_t>(r)));
    const State x0 = model.sample_initial(init, rng);
    const CadlagPath path = model.sample_free_motion(x0, 0.0, t, rng);
    const DualSystem sys = simulate_conditional(model, n, t, path, init, rng);
    const double weight = dual_weight(sys.frozen_line, model);
    const std::span<const CadlagPath> others(sys.free_lines.data(),
                                             static_cast<std::size_t>(n - 1));
    std::vector<double> row(static_cast<std::size_t>(nf));
    for (int k = 0; k < nf; ++k)
      row[static_cast<std::size_t>(k)] =
          weight * eval_paired(functionals, k, sys.frozen_line, others);
    return row;
  });

  DualityReport report;
  report.replicas = replicas;
  report.seed = seed;
  std::vector<double> lhs_col(static_cast<std::size_t>(replicas));
  std::vector<double> rhs_col(static_cast<std::size_t>(replicas));
  for (int k = 0; k < nf; ++k) {
    for (int r = 0; r < replicas; ++r) {
      lhs_col[static_cast<std::size_t>(r)] = lhs_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      rhs_col[static_cast<std::size_t>(r)] = rhs_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    }
    const Summary ls = summarize_or_throw(lhs_col);
    const Summary rs = summarize_or_throw(rhs_col);
    DualityRow row;
    row.name = functionals[static_cast<std::size_t>(k)].name;
    row.lhs = ls.mean;
    row.lhs_se = ls.std_error;
    row.rhs = rs.mean;
    row.rhs_se = rs.std_error;
    row.combined_se = std::sqrt(ls.std_error * ls.std_error + rs.std_error * rs.std_error);
    row.z = z_score(ls.mean, ls.std_error, rs.mean, rs.std_error);
    if (functionals[static_cast<std::size_t>(k)].oracle_value) {
      row.oracle_value = functionals[static_cast<std::size_t>(k)].oracle_value;
      row.z_lhs_oracle = z_score(ls.mean, ls.std_error, *row.oracle_value, 0.0);
      row.z_rhs_oracle = z_score(rs.mean, rs.std_error, *row.oracle_value, 0.0);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<PairedFunctional> standard_duality_battery(const FiniteCtmcModel& model, double t,
                                                       const Eigen::VectorXd& gamma0) {
  const OracleSolution sol = solve_gamma(model, gamma0, t);
  const OracleSolution half = solve_gamma(model, gamma0, t / 2.0);
  const Eigen::VectorXd w_half = semigroup_matrix(model, t / 2.0, t).rowwise().sum();

  // E[exp(-2 int V)] is the survival mass of the chain under a doubled
  // potential; an exact value for the exp(-int V) functional below.
  FiniteCtmcModel doubled(
      model.space(), [&model](double u) { return model.rate_matrix(u); }, model.rate_sup(),
      [&model](double u, int x) { return 2.0 * model.potential(u, x); },
      2.0 * model.potential_sup(), model.potential_time_constant(), model.rates_time_constant(),
      model.describe() + "|doubled-potential");
  const OracleSolution doubled_sol = solve_gamma(doubled, gamma0, t);

  auto terminal_eq = [](const CadlagPath& p, int s) {
    return state_index(p.terminal()) == s ? 1.0 : 0.0;
  };
  auto others_mean = [](std::span<const CadlagPath> others, auto&& fn) {
    double acc = 0.0;
    for (const CadlagPath& p : others) acc += fn(p);
    return acc / static_cast<double>(others.size());
  };
  auto potential_integral = [&model](const CadlagPath& p) {
    return integrate_potential(p, model, p.start_time(), p.end_time());
  };

  std::vector<PairedFunctional> battery;
  battery.push_back({"const_1", [](const CadlagPath&, std::span<const CadlagPath>) { return 1.0; },
                     sol.z});
  battery.push_back({"dist_terminal_eq_0",
                     [=](const CadlagPath& d, std::span<const CadlagPath>) {
                       return terminal_eq(d, 0);
                     },
                     sol.gamma[0]});
  battery.push_back({"dist_terminal_eq_1",
                     [=](const CadlagPath& d, std::span<const CadlagPath>) {
                       return terminal_eq(d, 1);
                     },
                     sol.gamma[1]});
  battery.push_back({"dist_midpoint_eq_1",
                     [t](const CadlagPath& d, std::span<const CadlagPath>) {
                       return state_index(d.at(t / 2.0)) == 1 ? 1.0 : 0.0;
                     },
                     half.gamma[1] * w_half[1]});
  battery.push_back({"dist_exp_neg_work",
                     [potential_integral](const CadlagPath& d, std::span<const CadlagPath>) {
                       return std::exp(-potential_integral(d));
                     },
                     doubled_sol.z});
  battery.push_back({"dist_jump_count",
                     [](const CadlagPath& d, std::span<const CadlagPath>) {
                       return static_cast<double>(d.events().size());
                     },
                     std::nullopt});
  battery.push_back({"dist_work",
                     [potential_integral](const CadlagPath& d, std::span<const CadlagPath>) {
                       return potential_integral(d);
                     },
                     std::nullopt});
  battery.push_back({"others_mean_terminal_eq_1",
                     [=](const CadlagPath&, std::span<const CadlagPath> o) {
                       return others_mean(o, [&](const CadlagPath& p) { return terminal_eq(p, 1); });
                     },
                     std::nullopt});
  battery.push_back({"dist1_x_others_mean1",
                     [=](const CadlagPath& d, std::span<const CadlagPath> o) {
                       return terminal_eq(d, 1) *
                              others_mean(o, [&](const CadlagPath& p) { return terminal_eq(p, 1); });
                     },
                     std::nullopt});
  battery.push_back({"dist_mid0_x_others_mean1",
                     [=](const CadlagPath& d, std::span<const CadlagPath> o) {
                       return (state_index(d.at(t / 2.0)) == 0 ? 1.0 : 0.0) *
                              others_mean(o, [&](const CadlagPath& p) { return terminal_eq(p, 1); });
                     },
                     std::nullopt});
  battery.push_back({"others_mean_work",
                     [=](const CadlagPath&, std::span<const CadlagPath> o) {
                       return others_mean(o, potential_integral);
                     },
                     std::nullopt});
  battery.push_back({"dist1_x_others_mean_jumps",
                     [=](const CadlagPath& d, std::span<const CadlagPath> o) {
                       return terminal_eq(d, 1) * others_mean(o, [](const CadlagPath& p) {
                                return static_cast<double>(p.events().size());
                              });
                     },
                     std::nullopt});
  return battery;
}

MonteCarloEstimate estimate_gamma(const Model& model, int n, double t, const PathFunctional& f,
                                  int replicas, const InitialLaw& init, std::uint64_t seed,
                                  int threads) {
  if (replicas < 2) throw std::invalid_argument("estimate_gamma: need at least 2 replicas");
  const int workers = resolve_thread_count(threads);
  auto values = replica_map<double>(replicas, workers, [&](int r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    const GenealogySystem sys = simulate_mean_field(model, n, t, init, rng);
    return occupation_measure(sys, f) * many_body_weight(sys);
  });
  const Summary s = summarize_or_throw(values);
  return MonteCarloEstimate{s.mean, s.std_error, replicas, seed};
}

std::vector<BiasRow> bias_sweep(const FiniteCtmcModel& model, double t, const PathFunctional& f,
                                std::function<double(const Eigen::VectorXd&)> eta_statistic,
                                const Eigen::VectorXd& gamma0, std::span<const int> n_list,
                                int replicas, const InitialLaw& init, std::uint64_t seed,
                                int threads) {
  const int workers = resolve_thread_count(threads);
  const OracleSolution sol = solve_gamma(model, gamma0, t);
  const double exact = eta_statistic(sol.eta);

  std::vector<BiasRow> rows;
  int n_index = 0;
  for (int n : n_list) {
    if (n < 2) throw std::invalid_argument("bias_sweep: every system size must be >= 2");
    const std::uint64_t size_master = derive_seed(seed, 1000 + static_cast<std::uint64_t>(n_index));
    auto values = replica_map<double>(replicas, workers, [&](int r) {
      Rng rng(derive_seed(size_master, static_cast<std::uint64_t>(r)));
      const GenealogySystem sys = simulate_mean_field(model, n, t, init, rng);
      return occupation_measure(sys, f);
    });
    const Summary s = summarize_or_throw(values);
    rows.push_back(BiasRow{n, s.mean - exact, s.std_error});
    ++n_index;
  }
  return rows;
}

FiniteCtmcModel make_schedule_model(const ScheduleFamily& family, double horizon) {
  const int k = static_cast<int>(family.energy.size());
  if (k < 2) throw std::invalid_argument("schedule family needs at least 2 states");
  for (double h : family.energy)
    if (!(h >= 0.0)) throw std::invalid_argument("schedule energies must be nonnegative");

  const std::vector<double> energy = family.energy;
  std::function<Eigen::MatrixXd(double)> base = family.base_rates;
  if (!base) {
    // Metropolis rates over the complete graph: reversible for the Boltzmann
    // law at every frozen inverse temperature.
    base = [energy, k](double b) {
      Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(k, k);
      for (int x = 0; x < k; ++x) {
        double exit = 0.0;
        for (int y = 0; y < k; ++y) {
          if (y == x) continue;
          const double r = std::min(1.0, std::exp(-b * (energy[static_cast<std::size_t>(y)] -
                                                        energy[static_cast<std::size_t>(x)]))) /
                           static_cast<double>(k - 1);
          rates(x, y) = r;
          exit += r;
        }
        rates(x, x) = -exit;
      }
      return rates;
    };
  }
  auto beta = family.beta;
  auto rates_at = [base, beta](double t) { return base(beta(t)); };

  // pi_beta L_beta = 0 is what makes the schedule experiment meaningful;
  // verify it numerically on a time grid before accepting the family.
  for (int g = 0; g <= 8; ++g) {
    const double t = horizon * g / 8.0;
    const double b = family.beta(t);
    Eigen::VectorXd pi(k);
    for (int x = 0; x < k; ++x) pi[x] = std::exp(-b * energy[static_cast<std::size_t>(x)]);
    pi /= pi.sum();
    const Eigen::VectorXd residual = rates_at(t).transpose() * pi;
    if (residual.cwiseAbs().maxCoeff() > 1e-10)
      throw ModelError("schedule family: base dynamics is not stationary for pi_beta");
  }

  const double max_h = *std::max_element(energy.begin(), energy.end());
  auto dbeta = family.beta_derivative;
  return FiniteCtmcModel(
      StateSpace::finite(k), rates_at, family.rate_sup,
      [energy, dbeta](double t, int x) { return dbeta(t) * energy[static_cast<std::size_t>(x)]; },
      family.beta_derivative_sup * max_h, family.time_constant_potential,
      /*rates_time_constant=*/false, family.description);
}

FreeEnergyResult free_energy_experiment(const ScheduleFamily& family, double t, int n,
                                        int replicas, std::uint64_t seed, int threads) {
  const FiniteCtmcModel model = make_schedule_model(family, t);
  const int k = model.n_states();

  Eigen::VectorXd pi0(k);
  double z0 = 0.0, zt = 0.0;
  for (int x = 0; x < k; ++x) {
    const double h = family.energy[static_cast<std::size_t>(x)];
    pi0[x] = std::exp(-family.beta(0.0) * h);
    z0 += std::exp(-family.beta(0.0) * h);
    zt += std::exp(-family.beta(t) * h);
  }
  pi0 /= pi0.sum();
  std::vector<double> weights(pi0.data(), pi0.data() + k);
  const InitialLaw init = InitialLaw::categorical(weights);

  const int workers = resolve_thread_count(threads);
  auto values = replica_map<double>(replicas, workers, [&](int r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    return many_body_weight(simulate_mean_field(model, n, t, init, rng));
  });
  const Summary s = summarize_or_throw(values);

  FreeEnergyResult out;
  out.particle = MonteCarloEstimate{s.mean, s.std_error, replicas, seed};
  out.exact_ratio = zt / z0;
  out.oracle_z = solve_gamma(model, pi0, t).z;
  out.identity_residual = free_energy_identity_residual(model, pi0, t);
  out.z = z_score(s.mean, s.std_error, out.exact_ratio, 0.0);
  return out;
}

}  // namespace fkpath
