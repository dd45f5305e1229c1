#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fkpath/conditional_dual.hpp"
#include "fkpath/functional.hpp"
#include "fkpath/stats.hpp"

namespace fkpath {

// One transition of the path-space Gibbs-Glauber kernel: refresh the
// conditional system with the current path frozen, then resample uniformly
// among the N terminal ancestral lines (the frozen path survives with
// probability 1/N). Every step moves; there is no accept/reject.
CadlagPath gibbs_step(const Model& model, int n, double t, const CadlagPath& x,
                      const InitialLaw& init, Rng& rng);

struct GibbsChainTrace {
  int n_particles = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // iterations x functionals
  std::vector<CadlagPath> iterates;         // retained only when requested
};

GibbsChainTrace gibbs_chain(const Model& model, int n, double t, const CadlagPath& x0, int iters,
                            const std::vector<PathFunctional>& functionals, const InitialLaw& init,
                            Rng& rng, bool keep_paths = false);

struct ReversibilityResult {
  std::string f_label;
  std::string g_label;
  double gap = 0.0;  // mean of f(X_k) g(X_{k+1}) - g(X_k) f(X_{k+1})
  double se = 0.0;   // batch-means standard error
  double z = 0.0;
};

// Estimates the detailed-balance symmetry gap along a chain started from x0,
// discarding `burn_in` steps and averaging over `steps` transitions.
ReversibilityResult reversibility_check(const Model& model, int n, double t,
                                        const PathFunctional& f, const PathFunctional& g,
                                        const CadlagPath& x0, int burn_in, int steps,
                                        const InitialLaw& init, Rng& rng);

}  // namespace fkpath
