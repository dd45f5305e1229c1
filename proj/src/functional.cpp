#include "fkpath/functional.hpp"

#include <cmath>

#include "fkpath/errors.hpp"
#include "fkpath/quadrature.hpp"

namespace fkpath {

PathFunctional PathFunctional::terminal(std::string label, std::function<double(const State&)> f) {
  return PathFunctional(std::move(label), [f = std::move(f)](const CadlagPath& path) {
    const double v = f(path.terminal());
    if (!std::isfinite(v)) throw NumericError("terminal functional evaluated to nonfinite value");
    return v;
  });
}

PathFunctional PathFunctional::time_integral(std::string label,
                                             std::function<double(double, const State&)> g) {
  return PathFunctional(std::move(label), [g = std::move(g)](const CadlagPath& path) {
    double total = 0.0;
    double seg_start = path.start_time();
    const State* seg_state = &path.initial_state();
    auto flush = [&](double seg_end) {
      if (seg_end > seg_start)
        total += adaptive_simpson([&](double s) { return g(s, *seg_state); }, seg_start, seg_end,
                                  1e-10);
    };
    for (const PathEvent& e : path.events()) {
      flush(e.time);
      seg_start = e.time;
      seg_state = &e.value;
    }
    flush(path.end_time());
    if (!std::isfinite(total)) throw NumericError("time integral evaluated to nonfinite value");
    return total;
  });
}

PathFunctional PathFunctional::jump_count() {
  return PathFunctional("jump_count", [](const CadlagPath& path) {
    return static_cast<double>(path.events().size());
  });
}

PathFunctional PathFunctional::product(std::string label, std::vector<PathFunctional> parts) {
  return PathFunctional(std::move(label), [parts = std::move(parts)](const CadlagPath& path) {
    double prod = 1.0;
    for (const PathFunctional& p : parts) prod *= p(path);
    return prod;
  });
}

PathFunctional PathFunctional::terminal_indicator(int state) {
  return terminal("terminal_eq_" + std::to_string(state),
                  [state](const State& x) { return state_index(x) == state ? 1.0 : 0.0; });
}

PathFunctional PathFunctional::occupation_time(int state) {
  return time_integral("occupation_" + std::to_string(state), [state](double, const State& x) {
    return state_index(x) == state ? 1.0 : 0.0;
  });
}

}  // namespace fkpath
