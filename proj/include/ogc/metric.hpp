#pragma once

#include "ogc/ode.hpp"
#include "ogc/types.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ogc {

/// A term c * prod_i x_i^p_i of a polynomial potential.
struct Monomial {
  double coef = 0.0;
  std::array<int, kMaxDim> pow{};
};

/// Potential V on a Euclidean chart together with the energy level E.
///
/// Either the separable oscillator sum lambda_i^2 x_i^2 (closed-form flows are
/// available for it) or a general polynomial.
class PotentialWell {
 public:
  static PotentialWell oscillator(std::vector<double> lambda, double energy);
  static PotentialWell polynomial(int dim, std::vector<Monomial> terms, double energy);

  int dim() const { return dim_; }
  double energy() const { return energy_; }
  bool is_oscillator() const { return oscillator_; }
  const std::vector<double>& lambdas() const { return lambda_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// Minimizer of V (Newton from the origin); the well is assumed star-shaped about it.
  Vec center() const;

  /// Point on V = E along the ray center + r u, r > 0. Throws if the ray never leaves the well.
  Vec boundary_point(const Vec& direction) const;

  /// Sampled check of the well invariants: bounded sublevel and |grad V| > 0 on V = E.
  void validate(int samples = 64) const;

 private:
  int dim_ = 0;
  double energy_ = 0.0;
  bool oscillator_ = false;
  std::vector<double> lambda_;
  std::vector<Monomial> terms_;
};

/// Unit directions covering the sphere: uniform angles in 2D, Fibonacci lattice on the
/// first three coordinates otherwise.
std::vector<Vec> sphere_directions(int dim, int count);

enum class MetricKind { Euclidean, Conformal, Jacobi, Tensor };

/// Scalar field and its gradient, used as a conformal factor.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

/// Christoffel symbols, gamma[k](i, j) = Gamma^k_ij.
struct Christoffel {
  std::array<Mat, kMaxDim> gamma;
  int dim = 0;
};

/// Metric tensor field on a Euclidean chart. Immutable after construction.
class MetricField {
 public:
  static MetricField euclidean(int dim);
  static MetricField conformal(int dim, ScalarField rho);
  static MetricField jacobi(std::shared_ptr<const PotentialWell> well);
  /// General symmetric tensor field; Christoffel symbols by central differences.
  static MetricField tensor(int dim, std::function<Mat(const Vec&)> g, double fd_step = 1e-5);

  int dim() const { return dim_; }
  MetricKind kind() const { return kind_; }
  bool is_conformal() const { return kind_ != MetricKind::Tensor; }
  const std::shared_ptr<const PotentialWell>& well() const { return well_; }

  /// rho(x) with g = rho * identity. Only for conformal kinds (Euclidean gives 1).
  double conformal_factor(const Vec& x) const;
  Vec conformal_gradient(const Vec& x) const;

  bool positive_at(const Vec& x) const;
  Mat g(const Vec& x) const;
  double quad(const Vec& x, const Vec& v) const;
  /// Gradient in x of g(x)(v, v) with v held fixed.
  Vec quad_gradient(const Vec& x, const Vec& v) const;
  /// g(x) v.
  Vec lower(const Vec& x, const Vec& v) const;
  /// g^{-1}(x) w for a covector w.
  Vec raise(const Vec& x, const Vec& w) const;
  /// Squared g-norm of a covector (for example d phi).
  double covector_norm_sq(const Vec& x, const Vec& w) const;

  Christoffel christoffel(const Vec& x) const;
  /// Gamma^k_ij v^i v^j.
  Vec christoffel_contract(const Vec& x, const Vec& v) const;

 private:
  int dim_ = 0;
  MetricKind kind_ = MetricKind::Euclidean;
  ScalarField rho_;
  std::shared_ptr<const PotentialWell> well_;
  std::function<Mat(const Vec&)> tensor_;
  double fd_step_ = 1e-5;

  void check_positive(const Vec& x, double rho) const;
  Christoffel numeric_christoffel(const Vec& x) const;
};

struct GeodesicOptions {
  double t_max = 10.0;
  double h = 1e-3;  // initial step
  double rtol = 1e-12;
  double atol = 1e-14;
  /// Stop when this scalar crosses zero upward (for example phi of a domain).
  std::function<double(const Vec&)> crossing;
  /// Truncate when the conformal factor drops below this value (metric degeneracy).
  double min_conformal_factor = 0.0;
  bool record = true;
};

struct GeodesicTrajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> v;
  bool crossed = false;
  bool truncated = false;
  std::string note;

  const Vec& end_point() const { return x.back(); }
  const Vec& end_velocity() const { return v.back(); }
};

/// Solves x'' + Gamma(x)(x', x') = 0 with adaptive Dormand-Prince steps.
GeodesicTrajectory integrate_geodesic(const MetricField& m, const Vec& x0, const Vec& v0,
                                      const GeodesicOptions& opts);

/// Christoffel symbols at x, throwing if x is outside the positivity region.
Christoffel christoffel_at(const MetricField& m, const Vec& x);

MetricField jacobi_metric_from_well(std::shared_ptr<const PotentialWell> well);

}  // namespace ogc
