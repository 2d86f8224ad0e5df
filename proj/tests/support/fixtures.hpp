#pragma once

#include "ogc/domain.hpp"
#include "ogc/metric.hpp"
#include "ogc/path_space.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace fixture {

using namespace ogc;

inline Domain ellipse(double a = 2.0, double b = 1.0) {
  DomainDescriptor d;
  d.kind = "ellipse";
  d.semi_axes = {a, b};
  return build_domain(d);
}

inline Domain disk(double r = 1.0) {
  DomainDescriptor d;
  d.kind = "disk";
  d.center = make_vec({0.0, 0.0});
  d.radius = r;
  return build_domain(d);
}

inline std::shared_ptr<const PotentialWell> oscillator(std::vector<double> lambda = {
                                                           1.0, std::numbers::sqrt2}) {
  return std::make_shared<PotentialWell>(PotentialWell::oscillator(std::move(lambda), 1.0));
}

inline Domain omega(double delta, std::shared_ptr<const PotentialWell> well = oscillator()) {
  DomainDescriptor d;
  d.kind = "jacobi";
  d.well = std::move(well);
  d.jacobi_delta = delta;
  return build_domain(d);
}

inline Vec boundary_at(const Domain& dom, double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  if (std::abs(c) < 1e-12) c = 0.0;
  if (std::abs(s) < 1e-12) s = 0.0;
  return dom.boundary_point(make_vec({c, s}));
}

// Boundary endpoints, interior nodes scattered inside a shrunken copy of the region.
inline DiscretePath random_path(const Domain& dom, int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> rad(0.05, 0.9);
  const Vec c = dom.center();
  std::vector<Vec> x(n + 1);
  x[0] = boundary_at(dom, ang(rng));
  x[n] = boundary_at(dom, ang(rng));
  for (int i = 1; i < n; ++i) {
    const Vec b = boundary_at(dom, ang(rng));
    x[i] = c + rad(rng) * (b - c);
  }
  return DiscretePath(std::move(x));
}

// Smooth random curve: a chord plus a few low sine modes, kept inside by shrinking.
inline DiscretePath smooth_random_path(const Domain& dom, int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(-0.15, 0.15);
  const Vec A = boundary_at(dom, ang(rng)), B = boundary_at(dom, ang(rng));
  const Vec c = dom.center();
  const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng), a4 = amp(rng);
  std::vector<Vec> x(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    Vec p = (1.0 - s) * A + s * B;
    p[0] += a1 * std::sin(std::numbers::pi * s) + a2 * std::sin(2 * std::numbers::pi * s);
    p[1] += a3 * std::sin(std::numbers::pi * s) + a4 * std::sin(3 * std::numbers::pi * s);
    if (i > 0 && i < n) p = c + 0.9 * (p - c);
    x[i] = p;
  }
  x[0] = A;
  x[n] = B;
  return DiscretePath(std::move(x));
}

}  // namespace fixture
