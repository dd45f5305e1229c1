#include "fkpath/mean_field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fkpath {

namespace {

// Extends one particle by free motion over (from, to], appending the sampled
// events to both its ancestral line and its marginal trajectory, and returns
// the potential integral picked up along the new segment.
double extend_particle(const Model& model, CadlagPath& line, CadlagPath& marginal, double from,
                       double to, Rng& rng) {
  const CadlagPath segment = model.sample_free_motion(marginal.terminal(), from, to, rng);
  for (const PathEvent& e : segment.events()) {
    line.record(e.time, e.value);
    marginal.record(e.time, e.value);
  }
  line.extend_to(to);
  marginal.extend_to(to);
  return integrate_potential(marginal, model, from, to);
}

}  // namespace

GenealogySystem simulate_mean_field(const Model& model, int n, double t, const InitialLaw& init,
                                    Rng& rng) {
  if (n < 2) throw std::invalid_argument("simulate_mean_field: need n >= 2 particles");
  if (!(t >= 0.0)) throw std::invalid_argument("simulate_mean_field: need t >= 0");

  GenealogySystem sys;
  sys.n_particles = n;
  sys.horizon = t;
  sys.lines.reserve(static_cast<std::size_t>(n));
  sys.marginals.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    State x = model.sample_initial(init, rng);
    sys.lines.emplace_back(0.0, 0.0, x);
    sys.marginals.emplace_back(0.0, 0.0, std::move(x));
  }

  const double vsup = model.potential_sup();
  double now = 0.0;
  while (true) {
    // One global selection clock for the whole system; a degenerate potential
    // leaves n independent copies of the free motion.
    double candidate = std::numeric_limits<double>::infinity();
    if (vsup > 0.0) {
      candidate = now + rng.exponential(static_cast<double>(n) * vsup);
      if (candidate <= now) continue;
    }
    const bool fires = candidate < t;
    const double segment_end = fires ? candidate : t;

    double mean_potential_increment = 0.0;
    for (int i = 0; i < n; ++i)
      mean_potential_increment += extend_particle(
          model, sys.lines[static_cast<std::size_t>(i)],
          sys.marginals[static_cast<std::size_t>(i)], now, segment_end, rng);
    sys.integrated_mean_potential += mean_potential_increment / static_cast<double>(n);

    if (!fires) break;
    now = candidate;

    const int jumper = rng.index_below(n);
    const double v = model.potential(now, sys.marginals[static_cast<std::size_t>(jumper)].terminal());
    if (rng.uniform() * vsup < v) {
      const int target = rng.index_below(n);
      if (target != jumper) {  // a self-target changes nothing and is not logged
        auto& line = sys.lines[static_cast<std::size_t>(jumper)];
        auto& donor = sys.lines[static_cast<std::size_t>(target)];
        line = splice_adopt(line, donor, now);
        auto& marginal = sys.marginals[static_cast<std::size_t>(jumper)];
        const State& adopted = donor.terminal();
        if (!(marginal.terminal() == adopted)) marginal.record(now, adopted);
        sys.selection_log.push_back(SelectionEvent{now, jumper, target});
      }
    }
  }
  return sys;
}

double occupation_measure(const GenealogySystem& sys, const PathFunctional& f) {
  double acc = 0.0;
  for (const CadlagPath& line : sys.lines) acc += f(line);
  return acc / static_cast<double>(sys.n_particles);
}

double many_body_weight(const GenealogySystem& sys) {
  return std::exp(-sys.integrated_mean_potential);
}

const CadlagPath& sample_ancestral_line(const GenealogySystem& sys, Rng& rng) {
  return sys.lines[static_cast<std::size_t>(rng.index_below(sys.n_particles))];
}

double recompute_integrated_mean_potential(const GenealogySystem& sys, const Model& model) {
  double acc = 0.0;
  for (const CadlagPath& marginal : sys.marginals)
    acc += integrate_potential(marginal, model, 0.0, sys.horizon);
  return acc / static_cast<double>(sys.n_particles);
}

}  // namespace fkpath
