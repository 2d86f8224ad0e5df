#pragma once

#include "ogc/domain.hpp"
#include "ogc/metric.hpp"

#include <memory>

namespace ogc {

/// Brake trajectory released at rest from P on V = E, with first variations in P.
struct NormalFlowPoint {
  Vec q, qdot, qddot;
  Mat q_P, qdot_P;
  double length = 0.0;  // Jacobi length from P, sqrt(2) * int (E - V) dt
};

/// Exact Jacobi distance to the well boundary V = E.
///
/// The minimizing Jacobi geodesics from the boundary are reparameterized brake
/// trajectories q'' = -grad V released at rest, so dist_E(Q) = length(P, t) for the
/// (P, t) with q(P, t) = Q and V(P) = E. The pair is found by Newton in (P, t^2 / 2).
/// Valid up to the first focal point of the boundary.
class JacobiDistance {
 public:
  explicit JacobiDistance(std::shared_ptr<const PotentialWell> well);

  const PotentialWell& well() const { return *well_; }

  NormalFlowPoint flow(const Vec& P, double t) const;
  /// Jacobi length of the brake trajectory from P up to time t.
  double length(const Vec& P, double t) const;

  struct Foot {
    Vec P;
    double t = 0.0;
    double dist = 0.0;
    Vec grad;  // Euclidean partials of dist_E
    Mat hess;
    bool converged = false;
    int iterations = 0;
  };

  /// Requires V(Q) < E. Throws Convergence when Newton fails.
  Foot solve(const Vec& Q, bool with_hessian = true) const;

  /// Time at which the brake trajectory from P has Jacobi length d (bisection).
  double time_at_length(const Vec& P, double d) const;

 private:
  std::shared_ptr<const PotentialWell> well_;
};

/// phi = delta - dist_E near the level dist_E = delta, blended into an affine function
/// of E - V deeper inside.
class JacobiLevelSet final : public LevelSet {
 public:
  /// width is the exact strip below the level dist_E = delta.
  JacobiLevelSet(std::shared_ptr<const PotentialWell> well, double delta, double width);

  int dim() const override { return well_->dim(); }
  std::string kind() const override { return "jacobi"; }
  double value(const Vec& x) const override;
  PhiJet jet(const Vec& x, bool with_hessian = true) const override;
  Vec center() const override { return center_; }
  double exact_width() const override { return width_; }
  Vec boundary_point(const Vec& direction) const override;

  double delta() const { return delta_; }
  const JacobiDistance& distance() const { return dist_; }
  /// Values of E - V bounding the blend band.
  double blend_start() const { return u1_; }
  double blend_end() const { return u2_; }

 private:
  std::shared_ptr<const PotentialWell> well_;
  JacobiDistance dist_;
  double delta_ = 0.0;
  double width_ = 0.0;
  double u1_ = 0.0, u2_ = 0.0;
  double far_offset_ = 0.0, far_slope_ = 0.0;
  Vec center_;

  PhiJet outside_jet(const Vec& x) const;
};

}  // namespace ogc
