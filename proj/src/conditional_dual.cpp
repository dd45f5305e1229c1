#include "fkpath/conditional_dual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fkpath {

DualSystem simulate_conditional(const Model& model, int n, double t, const CadlagPath& frozen,
                                const InitialLaw& init, Rng& rng) {
  if (n < 2) throw std::invalid_argument("simulate_conditional: need n >= 2 particles");
  if (!(t >= 0.0)) throw std::invalid_argument("simulate_conditional: need t >= 0");
  if (frozen.start_time() != 0.0 || frozen.end_time() < t)
    throw std::invalid_argument("simulate_conditional: frozen path must cover [0, t]");
  if (!model.space().contains(frozen.initial_state()))
    throw std::invalid_argument("simulate_conditional: frozen path starts outside state space");

  DualSystem sys{n, t, frozen.restricted(t), {}, {}};
  const int free = n - 1;
  std::vector<CadlagPath> marginals;  // endpoint processes of the free lines
  sys.free_lines.reserve(static_cast<std::size_t>(free));
  marginals.reserve(static_cast<std::size_t>(free));
  for (int i = 0; i < free; ++i) {
    State x = model.sample_initial(init, rng);
    sys.free_lines.emplace_back(0.0, 0.0, x);
    marginals.emplace_back(0.0, 0.0, std::move(x));
  }

  const double vsup = model.potential_sup();
  double now = 0.0;
  while (true) {
    double candidate = std::numeric_limits<double>::infinity();
    if (vsup > 0.0) {
      candidate = now + rng.exponential(static_cast<double>(free) * vsup);
      if (candidate <= now) continue;
    }
    const bool fires = candidate < t;
    const double segment_end = fires ? candidate : t;

    for (int i = 0; i < free; ++i) {
      auto& line = sys.free_lines[static_cast<std::size_t>(i)];
      auto& marginal = marginals[static_cast<std::size_t>(i)];
      const CadlagPath segment =
          model.sample_free_motion(marginal.terminal(), now, segment_end, rng);
      for (const PathEvent& e : segment.events()) {
        line.record(e.time, e.value);
        marginal.record(e.time, e.value);
      }
      line.extend_to(segment_end);
      marginal.extend_to(segment_end);
    }

    if (!fires) break;
    now = candidate;

    const int k = rng.index_below(free);
    auto& line = sys.free_lines[static_cast<std::size_t>(k)];
    auto& marginal = marginals[static_cast<std::size_t>(k)];
    const double v = model.potential(now, marginal.terminal());
    if (rng.uniform() * vsup < v) {
      // The frozen line is adopted with probability 2/n (always, for n = 2);
      // otherwise one of the n-2 other free lines, uniformly.
      const bool onto_frozen = rng.uniform() < 2.0 / static_cast<double>(n);
      int target_line = 0;
      const CadlagPath* donor = &sys.frozen_line;
      if (!onto_frozen) {
        int j = rng.index_below(free - 1);
        if (j >= k) ++j;
        donor = &sys.free_lines[static_cast<std::size_t>(j)];
        target_line = j + 1;
      }
      const State adopted = donor->at(now);
      line = splice_adopt(line, *donor, now);
      if (!(marginal.terminal() == adopted)) marginal.record(now, adopted);
      sys.selection_log.push_back(DualSelectionEvent{now, k + 1, target_line});
    }
  }
  return sys;
}

double dual_weight(const CadlagPath& frozen, const Model& model) {
  return std::exp(-integrate_potential(frozen, model, frozen.start_time(), frozen.end_time()));
}

double dual_generator_identity_residual(const std::vector<int>& config,
                                        const std::vector<double>& f,
                                        const std::vector<double>& v) {
  const int n = static_cast<int>(config.size());
  if (n < 3) throw std::invalid_argument("dual_generator_identity_residual: need n >= 3");
  for (int x : config)
    if (x < 0 || x >= static_cast<int>(f.size()) || x >= static_cast<int>(v.size()))
      throw std::invalid_argument("dual_generator_identity_residual: state outside tables");

  const double nd = static_cast<double>(n);
  const double f1 = f[static_cast<std::size_t>(config[0])];
  double sum_all_but_first = 0.0;
  for (int j = 1; j < n; ++j) sum_all_but_first += f[static_cast<std::size_t>(config[static_cast<std::size_t>(j)])];

  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    const double fi = f[static_cast<std::size_t>(config[static_cast<std::size_t>(i)])];
    const double vi = v[static_cast<std::size_t>(config[static_cast<std::size_t>(i)])];

    // Direct form: the sampler's target mixture (1-2/n) peers + (2/n) frozen.
    const double peer_mean = (sum_all_but_first - fi) / (nd - 2.0);
    const double direct = vi * ((1.0 - 2.0 / nd) * peer_mean + (2.0 / nd) * f1 - fi);

    // Rescaled form: (1-1/n) V against all non-frozen lines plus the 2V/n
    // extra jump onto the frozen line.
    const double mean_non_frozen = sum_all_but_first / (nd - 1.0);
    const double rescaled =
        (1.0 - 1.0 / nd) * vi * (mean_non_frozen - fi) + (2.0 / nd) * vi * (f1 - fi);

    worst = std::max(worst, std::abs(direct - rescaled));
  }
  return worst;
}

}  // namespace fkpath
