#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "fkpath/builtin_models.hpp"
#include "fkpath/mean_field.hpp"
#include "fkpath/oracle.hpp"
#include "fkpath/parallel.hpp"
#include "fkpath/stats.hpp"

using namespace fkpath;

namespace {

FiniteCtmcModel m2_without_potential() {
  Eigen::MatrixXd rates(2, 2);
  rates << -1.0, 1.0, 2.0, -2.0;
  return FiniteCtmcModel(
      StateSpace::finite(2), [rates](double) { return rates; }, 2.0,
      [](double, int) { return 0.0; }, 0.0, true, true, "m2-no-potential");
}

}  // namespace

TEST_CASE("zero potential degenerates to independent free motions") {
  const FiniteCtmcModel model = m2_without_potential();
  Rng rng(2);
  const GenealogySystem sys = simulate_mean_field(model, 6, 1.5, InitialLaw::uniform(), rng);
  CHECK(sys.selection_log.empty());
  CHECK(sys.integrated_mean_potential == 0.0);
  CHECK(many_body_weight(sys) == 1.0);
  CHECK(sys.lines.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(sys.lines[static_cast<std::size_t>(i)] == sys.marginals[static_cast<std::size_t>(i)]);
    CHECK(sys.lines[static_cast<std::size_t>(i)].end_time() == 1.5);
  }
}

TEST_CASE("argument validation") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(3);
  CHECK_THROWS_AS(simulate_mean_field(m2, 1, 1.0, InitialLaw::dirac(0), rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_mean_field(m2, 5, -1.0, InitialLaw::dirac(0), rng),
                  std::invalid_argument);
}

TEST_CASE("zero horizon") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(6);
  const GenealogySystem sys = simulate_mean_field(m2, 3, 0.0, InitialLaw::dirac(1), rng);
  CHECK(sys.selection_log.empty());
  CHECK(many_body_weight(sys) == 1.0);
  for (const CadlagPath& line : sys.lines) {
    CHECK(line.end_time() == 0.0);
    CHECK(line.events().empty());
  }
}

TEST_CASE("pinned particles accumulate the constant mean potential") {
  // no motion, everyone stays in state 1 where V = 1
  const FiniteCtmcModel pinned(
      StateSpace::finite(2), [](double) { return Eigen::MatrixXd::Zero(2, 2); }, 0.0,
      [](double, int x) { return x == 1 ? 1.0 : 0.0; }, 1.0, true, true, "pinned");
  Rng rng(4);
  const GenealogySystem sys = simulate_mean_field(pinned, 4, 2.0, InitialLaw::dirac(1), rng);
  CHECK(sys.integrated_mean_potential == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(many_body_weight(sys) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("occupation measure on hand-built systems") {
  const CadlagPath zero(0.0, 1.0, 0);
  const CadlagPath one(0.0, 1.0, 1);
  GenealogySystem sys;
  sys.n_particles = 2;
  sys.horizon = 1.0;
  sys.lines = {zero, one};

  const PathFunctional f1 = PathFunctional::terminal_indicator(1);
  CHECK(occupation_measure(sys, f1) == 0.5);

  const PathFunctional constant =
      PathFunctional::terminal("const", [](const State&) { return 3.25; });
  CHECK(occupation_measure(sys, constant) == 3.25);

  sys.lines = {one, one};
  CHECK(occupation_measure(sys, f1) == 1.0);
}

TEST_CASE("weight accumulator matches re-integration of the marginals") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(20260810);
  for (int rep = 0; rep < 50; ++rep) {
    const GenealogySystem sys = simulate_mean_field(m2, 5, 1.0, InitialLaw::dirac(0), rng);
    const double recomputed = recompute_integrated_mean_potential(sys, m2);
    CHECK(std::abs(sys.integrated_mean_potential - recomputed) <= 1e-10);
    CHECK(many_body_weight(sys) == doctest::Approx(std::exp(-recomputed)).epsilon(1e-10));
  }
}

TEST_CASE("system invariants on random runs") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    const GenealogySystem sys = simulate_mean_field(m2, 4, 1.0, InitialLaw::uniform(), rng);
    CHECK(sys.integrated_mean_potential >= 0.0);
    CHECK(sys.integrated_mean_potential <= sys.horizon * m2.potential_sup() + 1e-12);
    double last = 0.0;
    for (const SelectionEvent& e : sys.selection_log) {
      CHECK(e.time > last);
      CHECK(e.jumper != e.target);
      last = e.time;
      CHECK(e.jumper >= 0);
      CHECK(e.jumper < 4);
      CHECK(e.target >= 0);
      CHECK(e.target < 4);
    }
    for (const CadlagPath& line : sys.lines) {
      CHECK(line.start_time() == 0.0);
      CHECK(line.end_time() == 1.0);
    }
  }
}

TEST_CASE("sample_ancestral_line is uniform and seed-deterministic") {
  GenealogySystem sys;
  sys.n_particles = 2;
  sys.horizon = 1.0;
  sys.lines = {CadlagPath(0.0, 1.0, 0), CadlagPath(0.0, 1.0, 1)};

  Rng rng(99);
  const int draws = 100000;
  long firsts = 0;
  for (int r = 0; r < draws; ++r)
    if (state_index(sample_ancestral_line(sys, rng).initial_state()) == 0) ++firsts;
  const double se = std::sqrt(0.25 / draws);
  CHECK(std::abs(static_cast<double>(firsts) / draws - 0.5) <= 3.0 * se);

  Rng a(123), b(123);
  CHECK(sample_ancestral_line(sys, a) == sample_ancestral_line(sys, b));
}

TEST_CASE("weighted occupation estimates are unbiased for the weighted law") {
  const FiniteCtmcModel m2 = make_m2();
  Eigen::VectorXd gamma0(2);
  gamma0 << 1.0, 0.0;
  const InitialLaw init = InitialLaw::dirac(0);
  const int replicas = 20000;
  const OracleSolution sol = solve_gamma(m2, gamma0, 1.0);
  const PathFunctional f0 = PathFunctional::terminal_indicator(0);
  const PathFunctional f1 = PathFunctional::terminal_indicator(1);

  int n_index = 0;
  for (int n : {2, 10}) {
    auto rows = replica_map<std::array<double, 3>>(replicas, 2, [&](int r) {
      Rng rng(derive_seed(derive_seed(514, static_cast<std::uint64_t>(n_index)),
                          static_cast<std::uint64_t>(r)));
      const GenealogySystem sys = simulate_mean_field(m2, n, 1.0, init, rng);
      const double z = many_body_weight(sys);
      return std::array<double, 3>{occupation_measure(sys, f0) * z,
                                   occupation_measure(sys, f1) * z, z};
    });
    std::vector<double> col(static_cast<std::size_t>(replicas));
    const double targets[3] = {sol.gamma[0], sol.gamma[1], sol.z};
    for (int which = 0; which < 3; ++which) {
      for (int r = 0; r < replicas; ++r)
        col[static_cast<std::size_t>(r)] =
            rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(which)];
      const Summary s = summarize(col);
      CHECK(std::abs(s.mean - targets[which]) <= 3.0 * s.std_error);
    }
    ++n_index;
  }
}

TEST_CASE("exchangeability of the particle indices") {
  const FiniteCtmcModel m2 = make_m2();
  const int replicas = 20000;
  const int n = 4;
  auto rows = replica_map<std::array<double, 4>>(replicas, 2, [&](int r) {
    Rng rng(derive_seed(515, static_cast<std::uint64_t>(r)));
    const GenealogySystem sys = simulate_mean_field(m2, n, 1.0, InitialLaw::dirac(0), rng);
    std::array<double, 4> out{};
    for (int i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] =
          state_index(sys.lines[static_cast<std::size_t>(i)].terminal()) == 1 ? 1.0 : 0.0;
    return out;
  });
  std::vector<double> col(static_cast<std::size_t>(replicas));
  std::vector<Summary> sums;
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < replicas; ++r)
      col[static_cast<std::size_t>(r)] =
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
    sums.push_back(summarize(col));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double z = z_score(sums[static_cast<std::size_t>(i)].mean,
                               sums[static_cast<std::size_t>(i)].std_error,
                               sums[static_cast<std::size_t>(j)].mean,
                               sums[static_cast<std::size_t>(j)].std_error);
      CHECK(std::abs(z) <= 3.0);
    }
}

TEST_CASE("two-particle statistics decorrelate as the system grows") {
  // |E[f(xi^1) g(xi^2)] - eta(f) eta(g)| should fall consistently with c/N:
  // the N=20 gap is compared against a quarter of the N=5 gap.
  const FiniteCtmcModel m2 = make_m2();
  Eigen::VectorXd gamma0(2);
  gamma0 << 1.0, 0.0;
  const double eta1 = solve_gamma(m2, gamma0, 1.0).eta[1];
  const int replicas = 60000;

  auto chaos_gap = [&](int n, std::uint64_t master, Summary& out) {
    auto vals = replica_map<double>(replicas, 2, [&](int r) {
      Rng rng(derive_seed(master, static_cast<std::uint64_t>(r)));
      const GenealogySystem sys = simulate_mean_field(m2, n, 1.0, InitialLaw::dirac(0), rng);
      const double a = state_index(sys.lines[0].terminal()) == 1 ? 1.0 : 0.0;
      const double b = state_index(sys.lines[1].terminal()) == 1 ? 1.0 : 0.0;
      return a * b;
    });
    out = summarize(vals);
    return out.mean - eta1 * eta1;
  };

  Summary s5, s20;
  const double d5 = chaos_gap(5, 616, s5);
  const double d20 = chaos_gap(20, 617, s20);

  CHECK(d5 > 3.0 * s5.std_error);
  const double se_diff = std::sqrt(s5.std_error * s5.std_error + s20.std_error * s20.std_error);
  CHECK(d5 - d20 > 3.0 * se_diff);

  // consistency with a 1/N rate: d20 within 3 SE of d5 / 4
  const double se_quarter =
      std::sqrt(s5.std_error * s5.std_error / 16.0 + s20.std_error * s20.std_error);
  CHECK(std::abs(d20 - d5 / 4.0) <= 3.0 * se_quarter);
}
