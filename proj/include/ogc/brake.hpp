#pragma once

#include "ogc/domain.hpp"
#include "ogc/metric.hpp"
#include "ogc/obstacle_flow.hpp"
#include "ogc/path_space.hpp"

#include <memory>
#include <vector>

namespace ogc {

/// Jacobi length int sqrt(E - V) dl along the Euclidean gradient-ascent line of V from
/// Q to V = E. The last stretch, where E - V < terminal, uses the local expansion
/// (2/3) (E - V)^{3/2} / |grad V|.
double dist_e_approx(const PotentialWell& w, const Vec& Q, double terminal = 1e-8);

struct OmegaOptions {
  double width = 0.0;  // exact strip below the level; 0 = delta / 2
  DomainSettings settings;
  int certify_samples = 1024;
  bool force = false;  // keep the domain when the concavity check fails
};

struct OmegaDelta {
  Domain domain;
  MetricField metric;
  double delta = 0.0;
  double margin = 0.0;  // concavity margin on boundary samples of the level
  bool certified = false;
};

/// Omega_delta = {dist_E > delta} with phi = delta - dist_E near the level, prepared
/// constants and the Jacobi metric. Throws Precondition when the boundary is not
/// strongly concave at this delta unless forced.
OmegaDelta build_omega_delta(std::shared_ptr<const PotentialWell> w, double delta,
                             const OmegaOptions& opt = {});

/// t(s_i) = (1 / sqrt 2) int_0^{s_i} sqrt(c) / (E - V), Simpson on each segment with V
/// at the chord midpoint.
std::vector<double> maupertuis_time(const PotentialWell& w, const DiscretePath& p, double c);

struct BrakeOrbit {
  std::vector<double> t;
  std::vector<Vec> q, qdot;
  Vec brake_start, brake_end;
  double half_period = 0.0;
  double energy_residual = 0.0;  // sup_j |0.5 |qdot_j|^2 + V(q_j) - E|
  double brake_speed = 0.0;      // largest |qdot| at the two brake points
  double jacobi_length = 0.0;    // int sqrt(2) (E - V) dt over the half period
  double ogc_deviation = 0.0;    // largest distance from an OGC node to the trajectory
  double time_deviation = 0.0;   // largest |q(t_b + t(s_i)) - x_i| with Maupertuis node times
  double end_mismatch = 0.0;     // brake point reached from the far endpoint vs brake_end
  double launch_speed_defect = 0.0;  // relative chain-rule speed error at the launch node

  /// Cubic Hermite interpolation on the samples, t clamped to [0, T].
  Vec at(double time) const;
};

struct BrakeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double t_max = 50.0;  // integration budget for each extension
};

/// Extends an OGC of Omega_delta to the brake orbit through it: launch from the first
/// node with the chain-rule velocity (speed fixed by the energy), integrate
/// q'' = -grad V backward and forward until dV/dt changes sign, and check the far
/// endpoint's extension against the result.
BrakeOrbit brake_orbit_from_ogc(const PotentialWell& w, const CriticalCurve& ogc,
                                const BrakeOptions& opt = {});

/// Largest |a(s T_a) - b(s T_b)| over s in [0, 1], also against the time-reversed b.
double orbit_sup_distance(const BrakeOrbit& a, const BrakeOrbit& b, int samples = 2000);

}  // namespace ogc
