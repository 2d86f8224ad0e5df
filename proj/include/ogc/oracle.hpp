#pragma once

#include "ogc/brake.hpp"
#include "ogc/domain.hpp"
#include "ogc/metric.hpp"
#include "ogc/obstacle_flow.hpp"

#include <string>
#include <vector>

namespace ogc {

struct ShootOptions {
  double tol = 1e-10;          // bisection width in the boundary angle
  double zero_tol = 1e-9;      // |defect| treated as an exact root
  double length_budget = 0.0;  // 0 = four times the longest sampled chord
  int segments = 200;          // nodes of the returned DiscretePaths
  double merge_tol = 1e-4;     // endpoint distance below which two roots give one chord
  int threads = 1;
};

/// One inward-normal shot from the boundary point in direction (cos theta, sin theta).
struct Shot {
  double theta = 0.0;
  Vec start, end;
  double length = 0.0;
  double defect = 0.0;  // signed sine of the arrival angle with the normal
  bool returned = false;
  std::string note;
};

struct ShootingResult {
  std::vector<Shot> samples;
  std::vector<double> roots;           // boundary angles of orthogonal returns
  std::vector<CriticalCurve> ogcs;     // distinct chords, by increasing energy
  int skipped = 0;
  bool continuum = false;  // defect vanishes on the whole grid
  std::vector<std::string> notes;
};

Shot shoot_normal(const Domain& dom, const MetricField& m, double theta, double budget);

/// Orthogonal geodesic chords of a 2D domain by root-finding the arrival defect of
/// inward-normal shots over a grid of count boundary angles.
ShootingResult shoot_ogc_2d(const Domain& dom, const MetricField& m, int count,
                            const ShootOptions& opt = {});

struct OscillatorReference {
  std::vector<BrakeOrbit> orbits;  // one per axis, in coordinate order
  std::vector<std::string> warnings;
};

/// Axis brake orbits q_i(t) = (sqrt E / lambda_i) cos(sqrt 2 lambda_i t) e_i of
/// V = sum lambda_i^2 x_i^2, sampled at samples + 1 times on the half period.
OscillatorReference oscillator_reference(const std::vector<double>& lambda, double E,
                                         int samples = 2000);

/// Nearest-neighbour matching of two sets under a distance; distance is the larger of
/// the two directed maxima (infinite when exactly one set is empty).
struct SetComparison {
  double distance = 0.0;
  std::vector<int> a_to_b, b_to_a;
  std::vector<double> a_dist, b_dist;
};

SetComparison compare_curve_sets(const std::vector<CriticalCurve>& a,
                                 const std::vector<CriticalCurve>& b);
SetComparison compare_orbit_sets(const std::vector<BrakeOrbit>& a,
                                 const std::vector<BrakeOrbit>& b);

}  // namespace ogc
