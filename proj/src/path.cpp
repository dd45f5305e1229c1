#include "fkpath/path.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fkpath/model.hpp"
#include "fkpath/quadrature.hpp"

namespace fkpath {

namespace {

void check_domain(const CadlagPath& path, double s, const char* who) {
  if (!(s >= path.start_time() && s <= path.end_time()))
    throw std::domain_error(std::string(who) + ": time " + std::to_string(s) +
                            " outside path domain [" + std::to_string(path.start_time()) + ", " +
                            std::to_string(path.end_time()) + "]");
}

}  // namespace

CadlagPath::CadlagPath(double start_time, double end_time, State initial_state,
                       std::vector<PathEvent> events)
    : start_time_(start_time),
      end_time_(end_time),
      initial_state_(std::move(initial_state)),
      events_(std::move(events)) {
  if (!(end_time_ >= start_time_)) throw std::domain_error("path needs end_time >= start_time");
  double last = start_time_;
  for (const PathEvent& e : events_) {
    if (!(e.time > last)) throw std::domain_error("path event times must be strictly increasing");
    last = e.time;
  }
  if (!events_.empty() && events_.back().time > end_time_)
    throw std::domain_error("path event beyond end_time");
}

const State& CadlagPath::at(double s) const {
  check_domain(*this, s, "CadlagPath::at");
  // last event with time <= s
  auto it = std::upper_bound(events_.begin(), events_.end(), s,
                             [](double v, const PathEvent& e) { return v < e.time; });
  if (it == events_.begin()) return initial_state_;
  return std::prev(it)->value;
}

const State& CadlagPath::terminal() const {
  return events_.empty() ? initial_state_ : events_.back().value;
}

void CadlagPath::append(double time, State value) {
  const double last = events_.empty() ? start_time_ : events_.back().time;
  if (!(time > last))
    throw std::domain_error("CadlagPath::append: event time must strictly increase");
  events_.push_back(PathEvent{time, std::move(value)});
  if (time > end_time_) end_time_ = time;
}

void CadlagPath::record(double time, State value) {
  if (!events_.empty() && events_.back().time == time) {
    events_.back().value = std::move(value);
    return;
  }
  append(time, std::move(value));
}

void CadlagPath::extend_to(double new_end_time) {
  if (!(new_end_time >= end_time_))
    throw std::domain_error("CadlagPath::extend_to: domain cannot shrink");
  end_time_ = new_end_time;
}

CadlagPath CadlagPath::restricted(double s) const {
  check_domain(*this, s, "CadlagPath::restricted");
  auto it = std::upper_bound(events_.begin(), events_.end(), s,
                             [](double v, const PathEvent& e) { return v < e.time; });
  return CadlagPath(start_time_, s, initial_state_, std::vector<PathEvent>(events_.begin(), it));
}

CadlagPath splice_adopt(const CadlagPath& adopter, const CadlagPath& donor, double s) {
  if (adopter.start_time() != donor.start_time())
    throw std::domain_error("splice_adopt: paths start at different times");
  if (s < donor.start_time() || s > donor.end_time() || s > adopter.end_time())
    throw std::domain_error("splice_adopt: both paths must be defined on [start, s]");
  return donor.restricted(s);
}

double integrate_potential(const CadlagPath& path, const Model& model, double a, double b) {
  if (!(path.start_time() <= a && a <= b && b <= path.end_time()))
    throw std::domain_error("integrate_potential: [a, b] outside path domain");
  if (a == b) return 0.0;

  double total = 0.0;
  double seg_start = a;
  const State* seg_state = &path.at(a);
  auto flush = [&](double seg_end) {
    if (seg_end <= seg_start) return;
    if (model.potential_time_constant()) {
      total += (seg_end - seg_start) * model.potential(seg_start, *seg_state);
    } else {
      total += adaptive_simpson([&](double s) { return model.potential(s, *seg_state); },
                                seg_start, seg_end, 1e-10);
    }
  };
  for (const PathEvent& e : path.events()) {
    if (e.time <= a) continue;
    if (e.time >= b) break;
    flush(e.time);
    seg_start = e.time;
    seg_state = &e.value;
  }
  flush(b);
  return total;
}

namespace {

nlohmann::json state_to_json(const State& x) {
  if (const int* i = std::get_if<int>(&x)) return *i;
  return state_point(x);
}

State state_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<int>();
  return j.get<TorusPoint>();
}

}  // namespace

nlohmann::json path_to_json(const CadlagPath& path) {
  nlohmann::json events = nlohmann::json::array();
  for (const PathEvent& e : path.events()) events.push_back({e.time, state_to_json(e.value)});
  return {{"t0", path.start_time()},
          {"t1", path.end_time()},
          {"x0", state_to_json(path.initial_state())},
          {"events", std::move(events)}};
}

CadlagPath path_from_json(const nlohmann::json& j) {
  std::vector<PathEvent> events;
  for (const auto& e : j.at("events"))
    events.push_back(PathEvent{e.at(0).get<double>(), state_from_json(e.at(1))});
  return CadlagPath(j.at("t0").get<double>(), j.at("t1").get<double>(),
                    state_from_json(j.at("x0")), std::move(events));
}

}  // namespace fkpath
