#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fkpath/builtin_models.hpp"
#include "fkpath/conditional_dual.hpp"
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

CadlagPath sample_frozen(const Model& model, double t, std::uint64_t seed) {
  Rng rng(seed);
  const State x0 = model.sample_initial(InitialLaw::dirac(0), rng);
  return model.sample_free_motion(x0, 0.0, t, rng);
}

}  // namespace

TEST_CASE("zero potential leaves everyone alone") {
  const FiniteCtmcModel model = m2_without_potential();
  const CadlagPath frozen = sample_frozen(model, 1.0, 71);
  Rng rng(8);
  const DualSystem sys = simulate_conditional(model, 4, 1.0, frozen, InitialLaw::dirac(0), rng);
  CHECK(sys.selection_log.empty());
  CHECK(sys.frozen_line == frozen);
  CHECK(sys.free_lines.size() == 3);
  for (const CadlagPath& line : sys.free_lines) CHECK(line.end_time() == 1.0);
}

TEST_CASE("frozen line is replayed event-for-event") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const CadlagPath frozen = sample_frozen(m2, 1.0, 400 + static_cast<std::uint64_t>(rep));
    const DualSystem sys = simulate_conditional(m2, 5, 1.0, frozen, InitialLaw::dirac(0), rng);
    CHECK(sys.frozen_line == frozen);
    CHECK(sys.line(0) == frozen);
  }
}

TEST_CASE("two-particle systems always target the frozen line") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(10);
  long selections = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const CadlagPath frozen = sample_frozen(m2, 1.0, 900 + static_cast<std::uint64_t>(rep));
    const DualSystem sys = simulate_conditional(m2, 2, 1.0, frozen, InitialLaw::dirac(0), rng);
    for (const DualSelectionEvent& e : sys.selection_log) {
      ++selections;
      CHECK(e.target == 0);
      CHECK(e.jumper == 1);
    }
  }
  CHECK(selections > 0);
}

TEST_CASE("frozen-target fraction approaches 2/n") {
  const FiniteCtmcModel m2 = make_m2();
  for (int n : {3, 5}) {
    long pooled = 0;
    long frozen_hits = 0;
    auto counts = replica_map<std::pair<long, long>>(8000, 2, [&](int r) {
      Rng rng(derive_seed(derive_seed(20260810, static_cast<std::uint64_t>(n)),
                          static_cast<std::uint64_t>(r)));
      const State x0 = m2.sample_initial(InitialLaw::dirac(0), rng);
      const CadlagPath frozen = m2.sample_free_motion(x0, 0.0, 1.0, rng);
      const DualSystem sys = simulate_conditional(m2, n, 1.0, frozen, InitialLaw::dirac(0), rng);
      long hits = 0;
      for (const DualSelectionEvent& e : sys.selection_log)
        if (e.target == 0) ++hits;
      return std::pair<long, long>(static_cast<long>(sys.selection_log.size()), hits);
    });
    for (const auto& [total, hits] : counts) {
      pooled += total;
      frozen_hits += hits;
    }
    REQUIRE(pooled > 1000);
    const double p0 = 2.0 / n;
    const double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(pooled));
    CHECK(std::abs(static_cast<double>(frozen_hits) / static_cast<double>(pooled) - p0) <=
          3.0 * se);
  }
}

TEST_CASE("selection intensity: both algebraic forms agree") {
  // constants are annihilated by both forms
  CHECK(dual_generator_identity_residual({0, 1, 0}, {2.5, 2.5}, {0.3, 0.9}) == 0.0);
  // zero potential kills the intensity entirely
  CHECK(dual_generator_identity_residual({1, 0, 1, 0}, {0.1, 0.7}, {0.0, 0.0}) == 0.0);

  Rng rng(11);
  for (int n : {3, 5, 10}) {
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<int> config(static_cast<std::size_t>(n));
      for (int& x : config) x = rng.index_below(2);
      std::vector<double> f = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
      std::vector<double> v = {rng.uniform(), rng.uniform()};
      CHECK(dual_generator_identity_residual(config, f, v) <= 1e-12);
    }
  }

  CHECK_THROWS_AS(dual_generator_identity_residual({0, 1}, {0.0, 1.0}, {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("dual weight of explicit frozen paths") {
  const FiniteCtmcModel m2 = make_m2();

  const CadlagPath at_one(0.0, 1.0, 1);
  CHECK(dual_weight(at_one, m2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  const CadlagPath jump(0.0, 1.0, 0, {{0.4, 1}});
  CHECK(dual_weight(jump, m2) == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));

  const FiniteCtmcModel no_pot = m2_without_potential();
  CHECK(dual_weight(jump, no_pot) == 1.0);
}

TEST_CASE("argument validation") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(12);
  const CadlagPath too_short(0.0, 0.5, 0);
  CHECK_THROWS_AS(simulate_conditional(m2, 3, 1.0, too_short, InitialLaw::dirac(0), rng),
                  std::invalid_argument);
  const CadlagPath frozen = sample_frozen(m2, 1.0, 1);
  CHECK_THROWS_AS(simulate_conditional(m2, 1, 1.0, frozen, InitialLaw::dirac(0), rng),
                  std::invalid_argument);
}

TEST_CASE("the conditional engine drives the torus model") {
  const TorusDiffusionModel torus = make_torus1d();
  Rng rng(14);
  const State x0 = torus.sample_initial(InitialLaw::uniform(), rng);
  const CadlagPath frozen = torus.sample_free_motion(x0, 0.0, 0.3, rng);
  const DualSystem sys = simulate_conditional(torus, 3, 0.3, frozen, InitialLaw::uniform(), rng);
  CHECK(sys.frozen_line == frozen);
  for (const CadlagPath& line : sys.free_lines) {
    CHECK(line.end_time() == 0.3);
    double last = 0.0;
    for (const PathEvent& e : line.events()) {
      CHECK(e.time > last);
      last = e.time;
    }
  }
}

TEST_CASE("a frozen path beyond the horizon is replayed on [0, t]") {
  const FiniteCtmcModel m2 = make_m2();
  const CadlagPath frozen = sample_frozen(m2, 2.0, 73);
  Rng rng(13);
  const DualSystem sys = simulate_conditional(m2, 3, 1.0, frozen, InitialLaw::dirac(0), rng);
  CHECK(sys.frozen_line == frozen.restricted(1.0));
  CHECK(sys.frozen_line.end_time() == 1.0);
  for (const CadlagPath& line : sys.free_lines) CHECK(line.end_time() == 1.0);
}

TEST_CASE("occupation of the conditional system tracks the weighted law") {
  // E[m(zeta_t)(f) | frozen], averaged over free-motion frozen paths, drifts
  // from eta_t(f) by O(t/N): the gap must shrink visibly from N=10 to N=20.
  const FiniteCtmcModel m2 = make_m2();
  Eigen::VectorXd gamma0(2);
  gamma0 << 1.0, 0.0;
  const double eta1 = solve_gamma(m2, gamma0, 1.0).eta[1];
  const int replicas = 120000;

  auto gap = [&](int n, std::uint64_t master, Summary& out) {
    auto vals = replica_map<double>(replicas, 2, [&](int r) {
      Rng rng(derive_seed(master, static_cast<std::uint64_t>(r)));
      const State x0 = m2.sample_initial(InitialLaw::dirac(0), rng);
      const CadlagPath frozen = m2.sample_free_motion(x0, 0.0, 1.0, rng);
      const DualSystem sys = simulate_conditional(m2, n, 1.0, frozen, InitialLaw::dirac(0), rng);
      double acc = state_index(sys.frozen_line.terminal()) == 1 ? 1.0 : 0.0;
      for (const CadlagPath& line : sys.free_lines)
        acc += state_index(line.terminal()) == 1 ? 1.0 : 0.0;
      return acc / n;
    });
    out = summarize(vals);
    return out.mean - eta1;
  };

  Summary s10, s20;
  const double d10 = gap(10, 717, s10);
  const double d20 = gap(20, 718, s20);

  CHECK(std::abs(d10) > 3.0 * s10.std_error);  // the bias is real at N=10
  const double se_diff = std::sqrt(s10.std_error * s10.std_error + s20.std_error * s20.std_error);
  CHECK(std::abs(d10) - std::abs(d20) > 3.0 * se_diff);  // and shrinks with N

  // consistency with a 1/N rate: d20 within 3 SE of d10 / 2
  const double se_half =
      std::sqrt(s10.std_error * s10.std_error / 4.0 + s20.std_error * s20.std_error);
  CHECK(std::abs(d20 - d10 / 2.0) <= 3.0 * se_half);
}
