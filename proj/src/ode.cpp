#include "ogc/ode.hpp"

#include <algorithm>
#include <cmath>

namespace ogc::ode {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const Rhs& rhs;
  State k1, k2, k3, k4, k5, k6, k7, tmp;

  explicit Stepper(const Rhs& f, Eigen::Index n)
      : rhs(f), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n) {}

  // Returns the 5th-order solution; err receives the embedded error estimate.
  State step(double t, const State& y, double h, State* err) {
    rhs(t, y, k1);
    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (err) {
      rhs(t + h, y5, k7);
      *err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    }
    return y5;
  }
};

bool crossed(Crossing dir, double before, double after) {
  switch (dir) {
    case Crossing::Rising: return before < 0.0 && after >= 0.0;
    case Crossing::Falling: return before > 0.0 && after <= 0.0;
    case Crossing::Any: return (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0);
  }
  return false;
}

}  // namespace

State dopri_step(const Rhs& rhs, double t, const State& y, double h) {
  Stepper s(rhs, y.size());
  return s.step(t, y, h, nullptr);
}

Result integrate(const Rhs& rhs, double t0, const State& y0, double t_end, const Options& opts,
                 const std::optional<Event>& event) {
  Result out;
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  Stepper stepper(rhs, y0.size());

  double t = t0;
  State y = y0;
  double h = std::min(std::abs(opts.h0), opts.h_max);
  double e_prev = event ? event->fn(t, y) : 0.0;

  if (opts.record) {
    out.t.push_back(t);
    out.y.push_back(y);
  }

  State err(y0.size());
  while (dir * (t_end - t) > 0.0) {
    if (out.steps >= opts.max_steps) {
      out.truncated = true;
      out.note = "step budget exhausted";
      break;
    }
    h = std::min(h, dir * (t_end - t));
    if (h < opts.h_min) {
      out.truncated = true;
      out.note = "step size underflow";
      break;
    }
    State y_new = stepper.step(t, y, dir * h, &err);
    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(err_norm)) {
      h *= 0.25;
      continue;
    }
    if (err_norm > 1.0) {
      h *= std::max(0.1, 0.9 * std::pow(err_norm, -0.2));
      continue;
    }
    ++out.steps;
    const double t_new = t + dir * h;

    if (event) {
      const double e_new = event->fn(t_new, y_new);
      if (crossed(event->direction, e_prev, e_new)) {
        // Bisection on the step length from the last accepted state.
        double lo = 0.0, hi = h;
        State y_hi = y_new;
        double e_lo = e_prev;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          State y_mid = stepper.step(t, y, dir * mid, nullptr);
          const double e_mid = event->fn(t + dir * mid, y_mid);
          if (crossed(event->direction, e_lo, e_mid)) {
            hi = mid;
            y_hi = y_mid;
            if (std::abs(e_mid) <= event->tol) break;
          } else {
            lo = mid;
            e_lo = e_mid;
          }
          if (hi - lo <= 1e-16 * std::max(1.0, std::abs(t))) break;
        }
        out.event_hit = true;
        out.t_event = t + dir * hi;
        out.y_event = y_hi;
        if (opts.record) {
          out.t.push_back(out.t_event);
          out.y.push_back(y_hi);
        }
        return out;
      }
      e_prev = e_new;
    }

    t = t_new;
    y = std::move(y_new);
    if (opts.record) {
      out.t.push_back(t);
      out.y.push_back(y);
    }
    const double fac = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h = std::min(opts.h_max, h * std::clamp(fac, 0.2, 5.0));
  }
  if (!opts.record || out.t.empty() || out.t.back() != t) {
    out.t.push_back(t);
    out.y.push_back(y);
  }
  return out;
}

}  // namespace ogc::ode
