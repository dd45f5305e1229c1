#pragma once

#include <vector>

#include "fkpath/model.hpp"

namespace fkpath {

// Selection event of the conditional system. Indices refer to system lines
// with 0 the frozen line and 1..n-1 the free lines; target == 0 tags a jump
// onto the frozen line.
struct DualSelectionEvent {
  double time;
  int jumper;
  int target;
};

// The conditional ("dual") particle system: the first ancestral line is
// frozen to a given path and replayed untouched; the other N-1 lines interact
// with it.
struct DualSystem {
  int n_particles = 0;
  double horizon = 0.0;
  CadlagPath frozen_line;
  std::vector<CadlagPath> free_lines;  // n-1 ancestral lines
  std::vector<DualSelectionEvent> selection_log;

  const CadlagPath& line(int i) const { return i == 0 ? frozen_line : free_lines[i - 1]; }
};

// Simulates the conditional system on [0, t] given the frozen path. Free
// lines start i.i.d. from `init` and follow the free motion between
// selections; each fires a selection at rate V_s(x_i) (thinned against
// potential_sup on one global clock); the target is the frozen line with
// probability 2/n, otherwise uniform among the n-2 other free lines (for
// n = 2 the frozen line is the only possible target). Adoption splices the
// target's full ancestral line at the jump time.
DualSystem simulate_conditional(const Model& model, int n, double t, const CadlagPath& frozen,
                                const InitialLaw& init, Rng& rng);

// exp(-int_0^t V_s(frozen_s) ds): the weight the frozen path carries in the
// conditional many-body law.
double dual_weight(const CadlagPath& frozen, const Model& model);

// Max over free particles i of the absolute difference between the two
// algebraic forms of the conditional selection intensity applied to f:
//
//   V(x_i) [ (1-2/n) m(x^{-{1,i}})(f) + (2/n) f(x_1) - f(x_i) ]
//   (1-1/n) V(x_i) [ m(x^{-1})(f) - f(x_i) ] + (2/n) V(x_i) [ f(x_1) - f(x_i) ]
//
// The two are equal identically; the residual guards the rearrangement the
// direct sampler relies on. config holds the n >= 3 particle states; f and v
// are tabulated per state.
double dual_generator_identity_residual(const std::vector<int>& config,
                                        const std::vector<double>& f,
                                        const std::vector<double>& v);

}  // namespace fkpath
