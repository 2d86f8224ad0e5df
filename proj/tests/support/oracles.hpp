#pragma once

// Reference computations for tests. Kept independent of the library code paths
// they check: closed forms, brute force and quadrature only.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Distance from y to the ellipse (a cos s, b sin s): dense scan plus golden-section refinement.
inline double ellipse_distance(double a, double b, double y0, double y1) {
  auto d2 = [&](double s) {
    const double dx = a * std::cos(s) - y0, dy = b * std::sin(s) - y1;
    return dx * dx + dy * dy;
  };
  const int n = 20000;
  double best = 0.0, bd = d2(0.0);
  for (int i = 1; i < n; ++i) {
    const double s = 2.0 * std::numbers::pi * i / n;
    if (d2(s) < bd) {
      bd = d2(s);
      best = s;
    }
  }
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best - 2.0 * std::numbers::pi / n, hi = best + 2.0 * std::numbers::pi / n;
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    (d2(m1) < d2(m2) ? hi : lo) = (d2(m1) < d2(m2) ? m2 : m1);
  }
  return std::sqrt(d2(0.5 * (lo + hi)));
}

// int_x^1 sqrt(1 - s^2) ds.
inline double quarter_disk_area_from(double x) {
  auto F = [](double s) { return 0.5 * (s * std::sqrt(std::max(0.0, 1.0 - s * s)) + std::asin(s)); };
  return F(1.0) - F(x);
}

// Jacobi distance to {x^2 + 2 y^2 = 1} at E = 1 for points on the axes.
inline double oscillator_axis_distance_x(double x) { return quarter_disk_area_from(std::abs(x)); }
inline double oscillator_axis_distance_y(double y) {
  return quarter_disk_area_from(std::sqrt(2.0) * std::abs(y)) / std::sqrt(2.0);
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Jacobi distance to the boundary of the well x^2 + 2 y^2 <= 1 (E = 1): the brake
// trajectory from (cos th, sin th / sqrt 2) reaching Q, found by Newton in (th, t) with
// a finite-difference Jacobian, and its Jacobi length by quadrature.
struct OscillatorFoot {
  double theta = 0.0, t = 0.0, dist = 0.0;
};

inline Eigen::Vector2d oscillator_brake(double th, double t) {
  return {std::cos(th) * std::cos(std::sqrt(2.0) * t),
          std::sin(th) / std::sqrt(2.0) * std::cos(2.0 * t)};
}

inline OscillatorFoot oscillator_distance(const Eigen::Vector2d& Q) {
  double th = std::atan2(Q[1] * std::sqrt(2.0), Q[0]);
  const double u = 1.0 - Q[0] * Q[0] - 2.0 * Q[1] * Q[1];
  const double gn = std::hypot(2.0 * Q[0], 4.0 * Q[1]);
  double t = std::sqrt(2.0 * u) / gn;
  for (int it = 0; it < 100; ++it) {
    const Eigen::Vector2d r = oscillator_brake(th, t) - Q;
    if (r.norm() < 1e-15) break;
    const double h = 1e-7;
    Eigen::Matrix2d J;
    J.col(0) = (oscillator_brake(th + h, t) - oscillator_brake(th - h, t)) / (2 * h);
    J.col(1) = (oscillator_brake(th, t + h) - oscillator_brake(th, t - h)) / (2 * h);
    const Eigen::Vector2d d = J.fullPivLu().solve(r);
    th -= d[0];
    t -= d[1];
  }
  OscillatorFoot f;
  f.theta = th;
  f.t = t;
  f.dist = simpson(
      [&](double s) {
        const Eigen::Vector2d q = oscillator_brake(th, s);
        return std::sqrt(2.0) * (1.0 - q[0] * q[0] - 2.0 * q[1] * q[1]);
      },
      0.0, t);
  return f;
}

}  // namespace oracle

namespace oracle {

// Nodes of the segment [-1, 1] on the x-axis at uniform Jacobi arclength for
// rho = 1 - x^2, by bisection on the closed-form arclength.
inline std::vector<double> jacobi_uniform_axis_nodes(int n) {
  auto sigma = [](double x) {
    return 0.5 * (x * std::sqrt(std::max(0.0, 1.0 - x * x)) + std::asin(x)) +
           std::numbers::pi / 4.0;
  };
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double target = std::numbers::pi / 2.0 * i / n;
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sigma(mid) < target ? lo : hi) = mid;
    }
    xs[i] = 0.5 * (lo + hi);
  }
  return xs;
}

}  // namespace oracle

namespace oracle {

// Normal mode of V = q^T A q along a unit eigenvector e with eigenvalue mu, released at
// rest from the level V = E: q(t) = sqrt(E / mu) cos(sqrt(2 mu) t) e.
inline Eigen::Vector2d normal_mode(double mu, double E, const Eigen::Vector2d& e, double t) {
  return std::sqrt(E / mu) * std::cos(std::sqrt(2.0 * mu) * t) * e;
}

}  // namespace oracle
