#pragma once

#include "ogc/domain.hpp"
#include "ogc/metric.hpp"
#include "ogc/path_space.hpp"

#include <limits>
#include <string>
#include <vector>

namespace ogc {

enum class CurveClass { Trivial, OGC, WeakOGC, ObstacleGeodesic, Unconverged };

const char* to_string(CurveClass c);

struct FlowConfig {
  double initial_step = 1.0;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double armijo = 1e-4;
  int max_iterations = 1000;
  double stall = 0.0;  // projected-gradient norm; 0 = 1e-8 * n
  double boundary_tol = 1e-9;
  double contact_tol = 1e-6;
  double delta1 = 0.0;       // 0 = domain constant
  double Delta_star = 0.0;   // minimum I-interval width in s; 0 = max(delta0^2 / (K0^2 M0^2), 1/n)
  double escape_amplitude = 0.0;  // 0 = delta1 / 4
  int escape_rungs = 8;
  double M0_sq = std::numeric_limits<double>::infinity();
  double trivial_energy = -1.0;  // < 0 = delta1^2 / K0^2
  double orth_tol = 1e-3;        // sine of the endpoint angle with the normal
  double residual_tol = 1e-3;    // geodesic residual relative to the energy
  double multiplier_tol = 1e-6;
  double tangential_tol = 1e-4;
  double gamma_band = 0.0;  // 0 = delta1 / 20
  bool pinned_endpoints = false;
  int coarse_segments = 0;  // flow at this resolution first, 0 = off

  void validate() const;
  double stall_for(int n) const { return stall > 0.0 ? stall : 1e-8 * n; }
};

/// Resolved thresholds that depend on the domain constants.
struct FlowLimits {
  double delta1 = 0.0;
  double Delta_star = 0.0;
  double trivial_energy = 0.0;
  double escape_amplitude = 0.0;
  double gamma_band = 0.0;
};

FlowLimits resolve_limits(const Domain& dom, const FlowConfig& cfg, int n);

struct StepResult {
  DiscretePath path;
  double energy = 0.0;
  double pg_norm = 0.0;  // gradient restricted to admissible directions, before the step
  double alpha = 0.0;
  double displacement = 0.0;  // max node move
  int active = 0;             // constrained contact nodes
  bool accepted = false;
  bool stalled = false;
  bool line_search_failed = false;
};

/// One preconditioned projected-descent step. Endpoints move tangentially to the
/// boundary and are re-projected; contact nodes may not move outward; outside nodes
/// are pulled back. The energy never increases.
StepResult v_minus_step(const Domain& dom, const MetricField& m, const DiscretePath& p,
                        const FlowConfig& cfg);

/// Projected-gradient norm at p (the quantity compared against the stall threshold).
double stationarity(const Domain& dom, const MetricField& m, const DiscretePath& p,
                    const FlowConfig& cfg);

struct MultiplierProfile {
  std::vector<int> contact;         // interior nodes with phi >= -contact_tol
  std::vector<double> lambda;       // dphi(r_i) / |dphi|_g^2 on contact nodes
  std::vector<double> expected;     // -H^phi(v_i, v_i) / |dphi|_g^2 on contact nodes
  std::vector<double> tangential;   // |r_i - lambda_i grad_g phi|_g / F on contact nodes
  std::vector<double> geodesic;     // |r_i|_g / F on every node, zero at contact and ends
  double max_geodesic = 0.0;
  double max_tangential = 0.0;
  double min_lambda = std::numeric_limits<double>::infinity();
};

/// Discrete covariant acceleration r_i = -(n/2) g(x_i)^{-1} dF_h/dx_i (the Euler-Lagrange
/// form of the midpoint energy; n^2 (x_{i+1} - 2 x_i + x_{i-1}) for a flat metric), split
/// into its normal multiplier on contact nodes.
/// Throws Precondition when p is not a stalled flow point.
MultiplierProfile multiplier_profile(const Domain& dom, const MetricField& m,
                                     const DiscretePath& p, const FlowConfig& cfg = {});

struct CriticalCurve {
  DiscretePath path;
  CurveClass cls = CurveClass::Unconverged;
  double energy = 0.0;
  MultiplierProfile multipliers;
  double orth_defect_start = 0.0;
  double orth_defect_end = 0.0;
  double stationarity = 0.0;
  std::vector<std::pair<int, int>> interior_contact;
  std::string note;
};

/// Sine of the g-angle between the one-sided end velocity and the boundary normal.
std::pair<double, double> endpoint_defects(const Domain& dom, const MetricField& m,
                                           const DiscretePath& p);

/// The same curve traversed backward, with index-based fields remapped.
CriticalCurve reverse_curve(CriticalCurve c);

CriticalCurve classify(const Domain& dom, const MetricField& m, const DiscretePath& p,
                       const FlowConfig& cfg = {});

struct EscapeResult {
  bool descended = false;  // false: no amplitude on the ladder lowers the energy
  DiscretePath path;
  double energy = 0.0;
  double amplitude = 0.0;
  std::pair<int, int> interval{0, 0};
};

/// Interior node runs [a, b] with phi > -delta1/3 at a and b and phi <= -delta1/3 in
/// between, reaching into (-delta1, -delta1/3).
std::vector<std::pair<int, int>> escape_intervals(const Domain& dom, const DiscretePath& p,
                                                  double delta1);

/// Bump fields W_i = beta(phi(x_i)) grad phi(x_i) supported in the strip
/// -delta1 < phi < -delta1/3 on an escape interval, tried on a halving amplitude ladder.
/// Throws Precondition when there is no escape interval.
EscapeResult v_plus_escape(const Domain& dom, const MetricField& m, const DiscretePath& p,
                           const FlowConfig& cfg);

/// Surrogate tests of the trap set and its entrance band, from node values.
struct TrapStatus {
  bool in_lambda = false;
  bool in_gamma = false;
  bool avoids_ball = true;
  int intervals = 0;
};

TrapStatus trap_status(const Domain& dom, const MetricField& m, const DiscretePath& p,
                       const FlowConfig& cfg);

struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  std::string state;  // start | descent | escape | stall | trivial | budget
  double strip_min = 0.0;
  bool in_lambda = false;
  bool in_gamma = false;
};

struct FlowResult {
  CriticalCurve curve;
  std::vector<TraceRow> trace;
  int iterations = 0;
  int escapes = 0;
  bool budget_exhausted = false;
  bool entered_gamma = false;
  int first_gamma_iteration = -1;
};

/// Descent until stall, escape when the strip condition holds, repeat, classify.
FlowResult eta_flow(const Domain& dom, const MetricField& m, const DiscretePath& p0,
                    const FlowConfig& cfg);

}  // namespace ogc
