#pragma once

#include "ogc/domain.hpp"
#include "ogc/metric.hpp"
#include "ogc/obstacle_flow.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ogc {

/// Boundary points and the index pairs (i <= j) whose chords seed the family.
struct SweepGrid {
  std::vector<Vec> points;
  std::vector<std::pair<int, int>> pairs;
};

/// count boundary points: uniform angles in 2D (axis directions exact), otherwise the
/// 2 dim coordinate directions followed by a Fibonacci lattice.
std::vector<Vec> boundary_grid(const Domain& dom, int count);

/// All pairs i <= j, one representative per reversal class.
SweepGrid chord_grid(const Domain& dom, int count);

struct SweepConfig {
  FlowConfig flow;
  int segments = 200;
  double dedup_tol = 0.0;  // 0 = 2% of the domain diameter
  int threads = 1;
  bool keep_traces = true;
};

struct MemberOutcome {
  int i = 0, j = 0;
  CurveClass cls = CurveClass::Unconverged;
  double initial_energy = 0.0;
  double energy = 0.0;
  int iterations = 0;
  int escapes = 0;
  int cluster = -1;  // index into MinimaxReport::distinct for OGC members
  std::vector<TraceRow> trace;
};

struct MinimaxReport {
  std::vector<CriticalCurve> distinct;  // by increasing energy
  std::vector<double> levels;
  int count = 0;
  int target = 0;  // chart dimension N
  bool meets_target = false;
  double lower_bound = 0.0;  // delta1^2 / K0^2
  double M0_sq = 0.0;        // largest energy on the initial family
  double dedup_tol = 0.0;
  int histogram[5] = {0, 0, 0, 0, 0};  // indexed by CurveClass
  std::vector<MemberOutcome> members;
  std::vector<std::string> notes;

  int tally(CurveClass c) const { return histogram[static_cast<int>(c)]; }
};

/// Lowest-energy representative of each cluster of curves within tol in Hausdorff
/// distance. Input order is irrelevant: curves are visited by energy, then endpoints.
std::vector<CriticalCurve> dedup_geometric(const std::vector<CriticalCurve>& curves, double tol);

/// Largest distance between two of dirs boundary points.
double domain_diameter(const Domain& dom, int dirs = 256);

MinimaxReport family_sweep(const Domain& dom, const MetricField& m, const SweepGrid& grid,
                           const SweepConfig& cfg = {});

}  // namespace ogc
