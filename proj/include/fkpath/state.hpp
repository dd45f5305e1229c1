#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fkpath {

// A point of the state space: an index for finite chains, a point of the
// flat d-torus [0,1)^d for diffusions.
using TorusPoint = std::vector<double>;
using State = std::variant<int, TorusPoint>;

inline int state_index(const State& x) {
  if (const int* i = std::get_if<int>(&x)) return *i;
  throw std::domain_error("state is not a finite-chain index");
}

inline const TorusPoint& state_point(const State& x) {
  if (const TorusPoint* p = std::get_if<TorusPoint>(&x)) return *p;
  throw std::domain_error("state is not a torus point");
}

struct StateSpace {
  enum class Kind { finite, torus };

  Kind kind = Kind::finite;
  int size = 0;       // finite: number of states, >= 2
  int dimension = 0;  // torus: dimension, >= 1

  static StateSpace finite(int size) {
    if (size < 2) throw std::invalid_argument("finite state space needs size >= 2");
    return StateSpace{Kind::finite, size, 0};
  }

  static StateSpace torus(int dimension) {
    if (dimension < 1) throw std::invalid_argument("torus needs dimension >= 1");
    return StateSpace{Kind::torus, 0, dimension};
  }

  bool contains(const State& x) const {
    if (kind == Kind::finite) {
      const int* i = std::get_if<int>(&x);
      return i != nullptr && *i >= 0 && *i < size;
    }
    const TorusPoint* p = std::get_if<TorusPoint>(&x);
    if (p == nullptr || static_cast<int>(p->size()) != dimension) return false;
    for (double c : *p) {
      if (!(c >= 0.0 && c < 1.0)) return false;
    }
    return true;
  }
};

// Law of the time-zero state.
struct InitialLaw {
  enum class Kind { dirac, categorical, uniform };

  Kind kind = Kind::uniform;
  State atom = 0;                // dirac
  std::vector<double> weights;   // categorical, finite spaces only

  static InitialLaw dirac(State x) { return InitialLaw{Kind::dirac, std::move(x), {}}; }

  static InitialLaw categorical(std::vector<double> w) {
    double sum = 0.0;
    for (double wi : w) {
      if (!(wi >= 0.0)) throw std::invalid_argument("categorical weights must be nonnegative");
      sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("categorical weights must sum to 1 within 1e-12, got " +
                                  std::to_string(sum));
    return InitialLaw{Kind::categorical, 0, std::move(w)};
  }

  static InitialLaw uniform() { return InitialLaw{}; }
};

}  // namespace fkpath
