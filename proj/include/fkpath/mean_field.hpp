#pragma once

#include <cstdint>
#include <vector>

#include "fkpath/functional.hpp"
#include "fkpath/model.hpp"

namespace fkpath {

struct SelectionEvent {
  double time;
  int jumper;  // particle that jumped
  int target;  // particle whose ancestral line was adopted
};

// One realization of the N-particle interacting jump system with full
// genealogy. `lines` are the ancestral lines: a selection jump replaces the
// jumper's entire history with a copy of the target's, so they encode the
// genealogical tree at the horizon. `marginals` are the plain particle
// trajectories as they unfolded in time (free motion plus selection jumps to
// the target's current state); they are never rewritten and are what the
// running mean-potential integral is an integral of.
struct GenealogySystem {
  int n_particles = 0;
  double horizon = 0.0;
  std::vector<CadlagPath> lines;
  std::vector<CadlagPath> marginals;
  double integrated_mean_potential = 0.0;  // int_0^t m(xi_s)(V_s) ds
  std::vector<SelectionEvent> selection_log;
};

// Event-driven simulation over [0, t]. Between selection events every
// particle follows the free motion of the model; selection candidates arrive
// on one global Poisson clock of rate n * potential_sup and are accepted with
// probability V_s(x_i)/potential_sup for a uniformly chosen particle i; an
// accepted jump adopts the full ancestral line of a uniformly chosen target
// (a self-target is a distributional no-op and is not recorded). The running
// integral of the mean potential is accumulated segment-exactly as the
// simulation advances. Deterministic given (model, n, t, init, seed).
GenealogySystem simulate_mean_field(const Model& model, int n, double t, const InitialLaw& init,
                                    Rng& rng);

// Occupation measure of the genealogical tree applied to f: (1/N) sum_i f(line_i).
double occupation_measure(const GenealogySystem& sys, const PathFunctional& f);

// exp(-int_0^t m(xi_s)(V_s) ds), in (0, 1] for nonnegative potentials.
double many_body_weight(const GenealogySystem& sys);

// Uniform draw among the N ancestral lines.
const CadlagPath& sample_ancestral_line(const GenealogySystem& sys, Rng& rng);

// Post-hoc re-integration of int m(xi_s)(V_s) ds from the stored marginal
// trajectories; cross-checks the incremental accumulator.
double recompute_integrated_mean_potential(const GenealogySystem& sys, const Model& model);

}  // namespace fkpath
