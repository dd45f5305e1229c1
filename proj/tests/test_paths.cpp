#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fkpath/builtin_models.hpp"
#include "fkpath/path.hpp"
#include "fkpath/rng.hpp"

using namespace fkpath;

TEST_CASE("right-continuous evaluation") {
  const CadlagPath constant(0.0, 1.0, 0);
  CHECK(state_index(constant.at(0.5)) == 0);
  CHECK(state_index(constant.at(0.0)) == 0);
  CHECK(state_index(constant.at(1.0)) == 0);

  const CadlagPath one_jump(0.0, 1.0, 0, {{0.3, 1}});
  CHECK(state_index(one_jump.at(0.3)) == 1);  // value at the jump time is the new state
  CHECK(state_index(one_jump.at(0.2999)) == 0);

  const CadlagPath two_jumps(0.0, 1.0, 0, {{0.3, 1}, {0.7, 0}});
  CHECK(state_index(two_jumps.at(0.699)) == 1);
  CHECK(state_index(two_jumps.at(0.7)) == 0);
  CHECK(state_index(two_jumps.terminal()) == 0);

  CHECK_THROWS_AS((void)two_jumps.at(1.5), std::domain_error);
  CHECK_THROWS_AS((void)two_jumps.at(-0.1), std::domain_error);
}

TEST_CASE("construction rejects broken event lists") {
  CHECK_THROWS_AS(CadlagPath(0.0, 1.0, 0, {{0.5, 1}, {0.5, 0}}), std::domain_error);
  CHECK_THROWS_AS(CadlagPath(0.0, 1.0, 0, {{0.7, 1}, {0.3, 0}}), std::domain_error);
  CHECK_THROWS_AS(CadlagPath(0.0, 1.0, 0, {{1.2, 1}}), std::domain_error);
  CHECK_THROWS_AS(CadlagPath(0.0, 1.0, 0, {{0.0, 1}}), std::domain_error);
  CHECK_THROWS_AS(CadlagPath(1.0, 0.0, 0), std::domain_error);

  CadlagPath p(0.0, 0.5, 0);
  p.append(0.6, 1);  // append may grow the domain
  CHECK(p.end_time() == 0.6);
  CHECK_THROWS_AS(p.append(0.6, 0), std::domain_error);
  CHECK_THROWS_AS(p.extend_to(0.5), std::domain_error);
}

TEST_CASE("splice_adopt copies the donor history") {
  const CadlagPath donor(0.0, 1.0, 1, {{0.2, 0}});
  const CadlagPath adopter(0.0, 1.0, 0, {{0.4, 1}});

  const CadlagPath spliced = splice_adopt(adopter, donor, 0.5);
  CHECK(spliced.end_time() == 0.5);
  CHECK(state_index(spliced.initial_state()) == 1);
  REQUIRE(spliced.events().size() == 1);
  CHECK(state_index(spliced.at(0.1)) == 1);
  CHECK(state_index(spliced.at(0.3)) == 0);

  // self-adoption reproduces the path on [0, s]
  const CadlagPath self = splice_adopt(donor, donor, 1.0);
  CHECK(self == donor);

  for (double u : {0.0, 0.1, 0.25, 0.5}) {
    CHECK(state_index(splice_adopt(adopter, donor, 0.5).at(u)) == state_index(donor.at(u)));
  }

  const CadlagPath short_donor(0.0, 0.3, 1);
  CHECK_THROWS_AS(splice_adopt(adopter, short_donor, 0.5), std::domain_error);
  const CadlagPath late_start(0.2, 1.0, 1);
  CHECK_THROWS_AS(splice_adopt(adopter, late_start, 0.5), std::domain_error);
}

TEST_CASE("integrate_potential on the canonical two-state model") {
  const FiniteCtmcModel m2 = make_m2();

  const CadlagPath at_zero(0.0, 1.0, 0);
  CHECK(integrate_potential(at_zero, m2, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));

  const CadlagPath at_one(0.0, 2.0, 1);
  CHECK(integrate_potential(at_one, m2, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));

  const CadlagPath jump(0.0, 1.0, 0, {{0.4, 1}});
  CHECK(integrate_potential(jump, m2, 0.0, 1.0) == doctest::Approx(0.6).epsilon(1e-14));

  CHECK_THROWS_AS(integrate_potential(jump, m2, -0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(integrate_potential(jump, m2, 0.8, 0.2), std::domain_error);
}

TEST_CASE("integral additivity over random split points") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    const CadlagPath path = m2.sample_free_motion(0, 0.0, 2.0, rng);
    double a = 2.0 * rng.uniform();
    double b = 2.0 * rng.uniform();
    double c = 2.0 * rng.uniform();
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const double split = integrate_potential(path, m2, a, b) + integrate_potential(path, m2, b, c);
    const double whole = integrate_potential(path, m2, a, c);
    CHECK(std::abs(split - whole) <= 1e-12);
  }
}

TEST_CASE("time-dependent potential integrates through quadrature") {
  // V(t, x) = t * x has closed form x (b^2 - a^2) / 2 per segment.
  Eigen::MatrixXd rates(2, 2);
  rates << -1.0, 1.0, 1.0, -1.0;
  const FiniteCtmcModel model(
      StateSpace::finite(2), [rates](double) { return rates; }, 1.0,
      [](double t, int x) { return t * x; }, 10.0, /*potential_time_constant=*/false,
      /*rates_time_constant=*/true, "tv-test");

  const CadlagPath path(0.0, 2.0, 0, {{0.5, 1}, {1.5, 0}});
  const double expected = (1.5 * 1.5 - 0.5 * 0.5) / 2.0;
  CHECK(integrate_potential(path, model, 0.0, 2.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sampled paths satisfy the structural invariants") {
  const FiniteCtmcModel m2 = make_m2();
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const CadlagPath path = m2.sample_free_motion(rng.index_below(2), 0.0, 3.0, rng);
    CHECK(path.start_time() == 0.0);
    CHECK(path.end_time() == 3.0);
    double last = 0.0;
    for (const PathEvent& e : path.events()) {
      CHECK(e.time > last);
      CHECK(m2.space().contains(e.value));
      last = e.time;
      CHECK(state_index(path.at(e.time)) == state_index(e.value));
    }
  }
}

TEST_CASE("json round trip") {
  const CadlagPath path(0.0, 1.0, 0, {{0.25, 1}, {0.75, 0}});
  const CadlagPath back = path_from_json(path_to_json(path));
  CHECK(back == path);

  const CadlagPath torus(0.0, 0.2, TorusPoint{0.5}, {{0.1, TorusPoint{0.625}}});
  CHECK(path_from_json(path_to_json(torus)) == torus);
}
