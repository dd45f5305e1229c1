#pragma once

#include <string>
#include <vector>

#include "fkpath/state.hpp"

#include "json.hpp"

namespace fkpath {

class Model;

struct PathEvent {
  double time;
  State value;

  bool operator==(const PathEvent&) const = default;
};

// Piecewise-constant cadlag trajectory on [start_time, end_time]. Only the
// change-points are stored; diffusion paths store their grid points as
// change-points. Event times are strictly increasing and lie in
// (start_time, end_time]. Evaluation is right-continuous: at(s) is the value
// of the last event with time <= s, or the initial state if there is none.
class CadlagPath {
 public:
  CadlagPath(double start_time, double end_time, State initial_state,
             std::vector<PathEvent> events = {});

  double start_time() const { return start_time_; }
  double end_time() const { return end_time_; }
  const State& initial_state() const { return initial_state_; }
  const std::vector<PathEvent>& events() const { return events_; }

  const State& at(double s) const;
  const State& terminal() const;

  // Construction helpers used by the engines. append() requires a time
  // strictly after the last event (and after start_time); it also advances
  // end_time when needed. record() additionally accepts a time equal to the
  // last event's and overwrites its value: under right-continuity the latest
  // value at an instant wins, which is how a selection landing on a motion
  // grid point resolves. extend_to() grows the domain without an event.
  void append(double time, State value);
  void record(double time, State value);
  void extend_to(double new_end_time);

  // Copy of the path restricted to [start_time, s].
  CadlagPath restricted(double s) const;

  bool operator==(const CadlagPath& other) const = default;

 private:
  double start_time_;
  double end_time_;
  State initial_state_;
  std::vector<PathEvent> events_;
};

// Genealogical adoption at time s: the adopter discards its own history and
// takes a copy of the donor's path on [start, s]. Both paths must share the
// same start time and be defined at least up to s.
CadlagPath splice_adopt(const CadlagPath& adopter, const CadlagPath& donor, double s);

// Exact integral of the potential along the path over [a, b]. Closed form per
// constant segment when the model's potential is time-constant, adaptive
// Simpson (abs. tolerance 1e-10) per segment otherwise.
double integrate_potential(const CadlagPath& path, const Model& model, double a, double b);

// JSON record {t0, t1, x0, events: [[time, state], ...]}; states serialize as
// an integer or as an array of coordinates.
nlohmann::json path_to_json(const CadlagPath& path);
CadlagPath path_from_json(const nlohmann::json& j);

}  // namespace fkpath
