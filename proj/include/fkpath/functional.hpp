#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fkpath/path.hpp"

namespace fkpath {

// Bounded test functionals of a single path: terminal statistics, running
// time integrals, jump counts and products thereof.
class PathFunctional {
 public:
  static PathFunctional terminal(std::string label, std::function<double(const State&)> f);
  static PathFunctional time_integral(std::string label,
                                      std::function<double(double, const State&)> g);
  static PathFunctional jump_count();
  static PathFunctional product(std::string label, std::vector<PathFunctional> parts);

  // Terminal indicator 1{x_t == state} on a finite chain.
  static PathFunctional terminal_indicator(int state);
  // Occupation time of a finite-chain state: integral of 1{x_s == state}.
  static PathFunctional occupation_time(int state);

  double operator()(const CadlagPath& path) const { return eval_(path); }
  const std::string& label() const { return label_; }

 private:
  PathFunctional(std::string label, std::function<double(const CadlagPath&)> eval)
      : label_(std::move(label)), eval_(std::move(eval)) {}

  std::string label_;
  std::function<double(const CadlagPath&)> eval_;
};

}  // namespace fkpath
