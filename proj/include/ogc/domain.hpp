#pragma once

#include "ogc/metric.hpp"
#include "ogc/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ogc {

/// phi with its first and second chart derivatives at one point.
struct PhiJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

/// Signed boundary distance of a bounded region: negative inside, zero on the boundary.
///
/// Implementations must be exact (minus the metric distance to the boundary) on the
/// strip -exact_width() <= phi <= 0 and strictly below -exact_width() deeper inside.
class LevelSet {
 public:
  virtual ~LevelSet() = default;

  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual PhiJet jet(const Vec& x, bool with_hessian = true) const = 0;
  /// Interior point about which the region is star-shaped.
  virtual Vec center() const = 0;
  virtual double exact_width() const = 0;

  /// Boundary point on the ray center + r u. The default bisects phi.
  virtual Vec boundary_point(const Vec& direction) const;
};

struct DomainConstants {
  double delta_star = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double K0 = 1.0;
  double K0_sampled = 1.0;
  Vec x0;
  double rho0 = 0.0;
  double concavity_margin = 0.0;  // on the strip of width delta0
  bool concave = false;
};

/// Region given by a level set plus the geometric constants the flow depends on.
/// Cheap to copy; the level set is shared read-only.
class Domain {
 public:
  Domain() = default;
  Domain(std::shared_ptr<const LevelSet> level, DomainConstants constants);

  int dim() const { return level_->dim(); }
  std::string kind() const { return level_->kind(); }
  const LevelSet& level_set() const { return *level_; }
  const DomainConstants& constants() const { return constants_; }
  Domain with_constants(DomainConstants c) const { return Domain(level_, std::move(c)); }

  double phi(const Vec& x) const { return level_->value(x); }
  Vec grad_phi(const Vec& x) const { return level_->jet(x, false).grad; }
  Mat hess_phi(const Vec& x) const { return level_->jet(x, true).hess; }
  PhiJet jet(const Vec& x, bool with_hessian = true) const { return level_->jet(x, with_hessian); }

  Vec center() const { return level_->center(); }
  Vec boundary_point(const Vec& direction) const { return level_->boundary_point(direction); }
  /// Newton steps along grad phi until |phi| <= tol.
  Vec project_to_boundary(const Vec& x, double tol = 1e-12) const;
  /// Boundary point reached from b by moving along -grad phi(b) to the level phi = -depth.
  Vec push_inward(const Vec& b, double depth) const;

  /// Axis-aligned box containing the region (from sampled boundary points).
  std::pair<Vec, Vec> bounding_box(int samples = 256) const;

 private:
  std::shared_ptr<const LevelSet> level_;
  DomainConstants constants_;
};

struct DomainDescriptor {
  std::string kind;  // disk | ellipse | implicit | jacobi
  Vec center;        // disk
  double radius = 1.0;
  std::vector<double> semi_axes;  // ellipse / ellipsoid
  int dim = 2;                    // implicit
  std::vector<Monomial> terms;    // implicit f, region {f < 0}
  double delta_star = 0.0;        // implicit / jacobi: exact strip width (0 = estimate)
  std::shared_ptr<const PotentialWell> well;  // jacobi
  double jacobi_delta = 0.0;
};

/// Builds the level set and fills delta_star; the other constants are left for
/// prepare_domain.
Domain build_domain(const DomainDescriptor& desc);

/// Points in the strip -width <= phi <= 0, layered by depth under boundary samples.
std::vector<Vec> sample_strip(const Domain& dom, double width, int samples);

/// Largest eigenvalue of the covariant Hessian of phi restricted to ker d phi, g-unit vectors.
double tangential_hessian_max(const Domain& dom, const MetricField& metric, const Vec& x);

/// -max over strip samples of H^phi(v, v) for g-unit v tangent to the level set.
double concavity_margin(const Domain& dom, const MetricField& metric, double width, int samples);

struct LadderRung {
  double delta = 0.0;
  double margin = 0.0;
};

struct Delta0Result {
  double delta0 = 0.0;
  bool concave = false;
  double margin = 0.0;
  std::vector<LadderRung> rungs;  // every evaluated rung, descending
};

/// Geometric ladder delta_top * factor^k, k = 0..count-1.
std::vector<double> geometric_ladder(double top, double factor, int count);

/// Largest rung with positive concavity margin. Without one, delta0 falls back to
/// delta_star and the result is flagged non-concave.
Delta0Result compute_delta0(const Domain& dom, const MetricField& metric,
                            const std::vector<double>& ladder, int samples = 1024);

struct K0Result {
  double sampled = 1.0;
  double K0 = 1.0;
};

/// Sup of the g-norm of d phi over sampled points of the closure, times safety (>= 1).
K0Result compute_K0(const Domain& dom, const MetricField& metric, int samples,
                    double safety = 1.05);

/// Largest rung delta0 / 2^k below the minimum of -phi on the ball boundary.
double choose_delta1(const Domain& dom, const Vec& x0, double rho0, double delta0, double K0,
                     int samples = 256);

/// True when no sampled point of the sphere |x - x0| = rho0 reaches the strip phi >= -delta1.
bool strip_avoids_ball(const Domain& dom, const Vec& x0, double rho0, double delta1,
                       int samples);

struct DomainSettings {
  std::vector<double> ladder;  // empty = delta_star / 2^k, 8 rungs
  int concavity_samples = 1024;
  int k0_samples = 4096;
  double k0_safety = 1.05;
  std::optional<Vec> x0;  // default: level-set center
  double rho0 = 0.0;      // 0 = a quarter of the inscribed radius about x0
};

/// Computes delta0, delta1, K0 and the exclusion ball on a built domain.
Domain prepare_domain(const Domain& dom, const MetricField& metric, const DomainSettings& s);

enum class SpecialKind { TangentTangent, TangentOrthogonal };

struct SpecialGeodesic {
  SpecialKind kind = SpecialKind::TangentTangent;
  Vec start, end;
  double length = 0.0;
  double end_cosine = 0.0;  // |cos| of the arrival angle with the boundary normal
  bool hits_ball = false;
  std::vector<Vec> points;
};

struct SpecialScan {
  std::vector<SpecialGeodesic> chords;
  bool avoids_ball = true;
  int shots = 0;
};

/// Shoots geodesics from a boundary grid in tangential and inward normal directions
/// and keeps the chords ending tangentially (or orthogonally, for tangential starts).
/// Only for dimension 2.
SpecialScan scan_special_geodesics_2d(const Domain& dom, const MetricField& metric,
                                      double length_bound, int grid, const Vec& x0, double rho0,
                                      double angle_tol = 0.05);

const char* to_string(SpecialKind k);

}  // namespace ogc
