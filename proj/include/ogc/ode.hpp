#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ogc::ode {

using State = Eigen::VectorXd;
using Rhs = std::function<void(double t, const State& y, State& dydt)>;
using EventFn = std::function<double(double t, const State& y)>;

enum class Crossing { Rising, Falling, Any };

struct Event {
  EventFn fn;
  Crossing direction = Crossing::Rising;
  double tol = 1e-10;  // on |fn| at the localized point
};

struct Options {
  double rtol = 1e-11;
  double atol = 1e-13;
  double h0 = 1e-3;
  double h_min = 1e-14;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
  bool record = true;
};

struct Result {
  std::vector<double> t;
  std::vector<State> y;
  bool event_hit = false;
  double t_event = 0.0;
  State y_event;
  bool truncated = false;  // step underflow or budget exhausted
  std::string note;
  std::size_t steps = 0;

  const State& final_state() const { return event_hit ? y_event : y.back(); }
  double final_time() const { return event_hit ? t_event : t.back(); }
};

/// Adaptive Dormand-Prince 5(4) from t0 toward t_end (either direction).
/// Events are localized by bisection on the step length from the last
/// accepted state; integration stops at the first event.
Result integrate(const Rhs& rhs, double t0, const State& y0, double t_end, const Options& opts,
                 const std::optional<Event>& event = std::nullopt);

/// One explicit Dormand-Prince step of size h without error control.
State dopri_step(const Rhs& rhs, double t, const State& y, double h);

}  // namespace ogc::ode
