#pragma once

#include "ogc/domain.hpp"
#include "ogc/metric.hpp"

#include <optional>
#include <vector>

namespace ogc {

/// Polyline x_0..x_n at uniform parameters s_i = i / n, endpoints on the boundary.
struct DiscretePath {
  std::vector<Vec> nodes;
  std::optional<double> energy;  // cached F_h, reset by anything that moves nodes

  DiscretePath() = default;
  explicit DiscretePath(std::vector<Vec> x) : nodes(std::move(x)) {}

  int segments() const { return static_cast<int>(nodes.size()) - 1; }
  int dim() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().size()); }
  const Vec& front() const { return nodes.front(); }
  const Vec& back() const { return nodes.back(); }
};

struct PathTolerances {
  double boundary = 1e-9;  // |phi| at endpoints, phi <= boundary elsewhere
  double contact = 1e-6;   // phi >= -contact counts as touching
};

/// Throws Precondition when an endpoint is off the boundary or a node is outside.
void check_admissible(const Domain& dom, const DiscretePath& p, const PathTolerances& tol = {});

/// True when reversing p gives a lexicographically smaller node sequence.
bool reversed_is_canonical(const DiscretePath& p);

DiscretePath reverse_path(const DiscretePath& p);

/// Straight chart segment A -> B, outside nodes pulled back onto the boundary, resampled
/// to uniform chart speed. Built from the lexicographically smaller endpoint, so
/// reverse(chord(A, B)) == chord(B, A) node for node; A == B gives the constant path.
DiscretePath chord_family(const Domain& dom, const Vec& A, const Vec& B, int n);

/// Linear refinement to n segments with outside nodes pulled back onto the boundary.
DiscretePath resample_path(const Domain& dom, const DiscretePath& p, int n);

/// n * sum_i g(m_i)(dx_i, dx_i) with m_i the segment midpoint.
double path_energy(const MetricField& m, const DiscretePath& p);

/// Exact node gradient of path_energy.
std::vector<Vec> energy_gradient(const MetricField& m, const DiscretePath& p);

/// Discrete integral of g(x', x') over [s_a, s_b].
double partial_energy(const MetricField& m, const DiscretePath& p, int a, int b);

/// Sum of segment lengths in the midpoint metric.
double path_length(const MetricField& m, const DiscretePath& p);

/// sqrt(n sum |dp_i - dq_i|^2) + max(|p_0 - q_0|, |p_n - q_n|), chart norms.
double dist_star(const DiscretePath& p, const DiscretePath& q);

struct ContactSet {
  std::vector<std::pair<int, int>> intervals;  // maximal, sorted, inclusive
  int n = 0;

  bool empty() const { return intervals.empty(); }
  /// Intervals containing neither 0 nor n.
  std::vector<std::pair<int, int>> interior() const;
  bool touches(int i) const;
};

ContactSet contact_set(const Domain& dom, const DiscretePath& p, double tol);

/// min of phi over nodes a..b.
double strip_min(const Domain& dom, const DiscretePath& p, int a, int b);

/// phi at every node.
std::vector<double> phi_profile(const Domain& dom, const DiscretePath& p);

/// Symmetric Hausdorff distance between the polylines (nodes against segments).
double hausdorff(const DiscretePath& p, const DiscretePath& q);

}  // namespace ogc
