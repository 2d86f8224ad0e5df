#include "ogc/metric.hpp"

#include <cmath>
#include <numbers>

namespace ogc {
namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

std::vector<Vec> sphere_directions(int dim, int count) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(make_vec({1.0}));
    dirs.push_back(make_vec({-1.0}));
    return dirs;
  }
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      dirs.push_back(make_vec({std::cos(th), std::sin(th)}));
    }
    return dirs;
  }
  // Fibonacci lattice on the first three coordinates.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec d = Vec::Zero(dim);
    d[0] = r * std::cos(golden * k);
    d[1] = r * std::sin(golden * k);
    d[2] = z;
    dirs.push_back(d);
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// PotentialWell

PotentialWell PotentialWell::oscillator(std::vector<double> lambda, double energy) {
  require(!lambda.empty() && static_cast<int>(lambda.size()) <= kMaxDim, ErrorCode::InvalidArgument,
          "oscillator: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  for (double l : lambda) require(l > 0.0, ErrorCode::InvalidArgument, "oscillator: lambda_i must be > 0");
  require(energy > 0.0, ErrorCode::InvalidArgument, "oscillator: energy must be > 0");
  PotentialWell w;
  w.dim_ = static_cast<int>(lambda.size());
  w.energy_ = energy;
  w.oscillator_ = true;
  w.lambda_ = std::move(lambda);
  for (int i = 0; i < w.dim_; ++i) {
    Monomial m;
    m.coef = w.lambda_[i] * w.lambda_[i];
    m.pow[i] = 2;
    w.terms_.push_back(m);
  }
  return w;
}

PotentialWell PotentialWell::polynomial(int dim, std::vector<Monomial> terms, double energy) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "polynomial well: bad dimension");
  require(!terms.empty(), ErrorCode::InvalidArgument, "polynomial well: no terms");
  for (const auto& t : terms)
    for (int i = dim; i < kMaxDim; ++i)
      require(t.pow[i] == 0, ErrorCode::InvalidArgument, "polynomial well: exponent beyond dimension");
  PotentialWell w;
  w.dim_ = dim;
  w.energy_ = energy;
  w.terms_ = std::move(terms);
  return w;
}

double PotentialWell::value(const Vec& x) const {
  if (oscillator_) {
    double v = 0.0;
    for (int i = 0; i < dim_; ++i) v += lambda_[i] * lambda_[i] * x[i] * x[i];
    return v;
  }
  double v = 0.0;
  for (const auto& t : terms_) {
    double p = t.coef;
    for (int i = 0; i < dim_; ++i) p *= ipow(x[i], t.pow[i]);
    v += p;
  }
  return v;
}

Vec PotentialWell::gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim_);
  if (oscillator_) {
    for (int i = 0; i < dim_; ++i) g[i] = 2.0 * lambda_[i] * lambda_[i] * x[i];
    return g;
  }
  for (const auto& t : terms_) {
    for (int k = 0; k < dim_; ++k) {
      if (t.pow[k] == 0) continue;
      double p = t.coef * t.pow[k] * ipow(x[k], t.pow[k] - 1);
      for (int i = 0; i < dim_; ++i)
        if (i != k) p *= ipow(x[i], t.pow[i]);
      g[k] += p;
    }
  }
  return g;
}

Mat PotentialWell::hessian(const Vec& x) const {
  Mat h = Mat::Zero(dim_, dim_);
  if (oscillator_) {
    for (int i = 0; i < dim_; ++i) h(i, i) = 2.0 * lambda_[i] * lambda_[i];
    return h;
  }
  for (const auto& t : terms_) {
    for (int a = 0; a < dim_; ++a) {
      for (int b = a; b < dim_; ++b) {
        double p = t.coef;
        if (a == b) {
          if (t.pow[a] < 2) continue;
          p *= t.pow[a] * (t.pow[a] - 1) * ipow(x[a], t.pow[a] - 2);
        } else {
          if (t.pow[a] == 0 || t.pow[b] == 0) continue;
          p *= t.pow[a] * ipow(x[a], t.pow[a] - 1) * t.pow[b] * ipow(x[b], t.pow[b] - 1);
        }
        for (int i = 0; i < dim_; ++i)
          if (i != a && i != b) p *= ipow(x[i], t.pow[i]);
        h(a, b) += p;
        if (a != b) h(b, a) += p;
      }
    }
  }
  return h;
}

Vec PotentialWell::center() const {
  Vec x = Vec::Zero(dim_);
  if (oscillator_) return x;
  for (int it = 0; it < 100; ++it) {
    const Vec g = gradient(x);
    if (g.norm() < 1e-14) break;
    const Mat h = hessian(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      x -= 1e-2 * g;  // not convex here; fall back to a gradient step
      continue;
    }
    x -= h.ldlt().solve(g);
  }
  return x;
}

Vec PotentialWell::boundary_point(const Vec& direction) const {
  const Vec c = center();
  const Vec u = direction.normalized();
  require(value(c) < energy_, ErrorCode::Precondition, "well: energy below the minimum of V");
  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (value(c + hi * u) < energy_) {
    lo = hi;
    hi *= 2.0;
    require(++grow < 40, ErrorCode::Degenerate, "well: sublevel set is unbounded along a ray");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(c + mid * u) < energy_ ? lo : hi) = mid;
  }
  // Polish with Newton along the ray.
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const Vec p = c + r * u;
    const double d = gradient(p).dot(u);
    if (std::abs(d) < 1e-300) break;
    const double step = (value(p) - energy_) / d;
    if (r - step <= lo || r - step >= hi) break;
    r -= step;
  }
  return c + r * u;
}

void PotentialWell::validate(int samples) const {
  for (const Vec& u : sphere_directions(dim_, std::max(samples, 4))) {
    const Vec p = boundary_point(u);
    require(gradient(p).norm() > 1e-10, ErrorCode::Degenerate,
            "well: energy is not a regular value (grad V vanishes on V = E)");
  }
}

// ---------------------------------------------------------------------------
// MetricField

MetricField MetricField::euclidean(int dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "metric: bad dimension");
  MetricField m;
  m.dim_ = dim;
  m.kind_ = MetricKind::Euclidean;
  return m;
}

MetricField MetricField::conformal(int dim, ScalarField rho) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "metric: bad dimension");
  require(static_cast<bool>(rho.value) && static_cast<bool>(rho.gradient), ErrorCode::InvalidArgument,
          "metric: conformal factor needs value and gradient");
  MetricField m;
  m.dim_ = dim;
  m.kind_ = MetricKind::Conformal;
  m.rho_ = std::move(rho);
  return m;
}

MetricField MetricField::jacobi(std::shared_ptr<const PotentialWell> well) {
  require(well != nullptr, ErrorCode::InvalidArgument, "metric: null well");
  MetricField m;
  m.dim_ = well->dim();
  m.kind_ = MetricKind::Jacobi;
  m.well_ = std::move(well);
  return m;
}

MetricField MetricField::tensor(int dim, std::function<Mat(const Vec&)> g, double fd_step) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "metric: bad dimension");
  MetricField m;
  m.dim_ = dim;
  m.kind_ = MetricKind::Tensor;
  m.tensor_ = std::move(g);
  m.fd_step_ = fd_step;
  return m;
}

double MetricField::conformal_factor(const Vec& x) const {
  switch (kind_) {
    case MetricKind::Euclidean: return 1.0;
    case MetricKind::Conformal: return rho_.value(x);
    case MetricKind::Jacobi: return well_->energy() - well_->value(x);
    case MetricKind::Tensor: break;
  }
  throw Error(ErrorCode::Unsupported, "metric: conformal factor of a general tensor metric");
}

Vec MetricField::conformal_gradient(const Vec& x) const {
  switch (kind_) {
    case MetricKind::Euclidean: return Vec::Zero(dim_);
    case MetricKind::Conformal: return rho_.gradient(x);
    case MetricKind::Jacobi: return -well_->gradient(x);
    case MetricKind::Tensor: break;
  }
  throw Error(ErrorCode::Unsupported, "metric: conformal gradient of a general tensor metric");
}

bool MetricField::positive_at(const Vec& x) const {
  if (kind_ == MetricKind::Tensor) {
    Eigen::SelfAdjointEigenSolver<Mat> es(tensor_(x));
    return es.eigenvalues().minCoeff() > 0.0;
  }
  return conformal_factor(x) > 0.0;
}

void MetricField::check_positive(const Vec& x, double rho) const {
  if (!(rho > 0.0)) {
    std::string where;
    for (int i = 0; i < x.size(); ++i) where += (i ? "," : "") + std::to_string(x[i]);
    throw Error(ErrorCode::Evaluation, "metric: not positive definite at (" + where + ")");
  }
}

Mat MetricField::g(const Vec& x) const {
  if (kind_ == MetricKind::Tensor) return tensor_(x);
  return conformal_factor(x) * Mat::Identity(dim_, dim_);
}

double MetricField::quad(const Vec& x, const Vec& v) const {
  if (kind_ == MetricKind::Tensor) return v.dot(tensor_(x) * v);
  return conformal_factor(x) * v.squaredNorm();
}

Vec MetricField::quad_gradient(const Vec& x, const Vec& v) const {
  if (kind_ == MetricKind::Tensor) {
    Vec out(dim_);
    for (int k = 0; k < dim_; ++k) {
      Vec xp = x, xm = x;
      xp[k] += fd_step_;
      xm[k] -= fd_step_;
      out[k] = (v.dot(tensor_(xp) * v) - v.dot(tensor_(xm) * v)) / (2.0 * fd_step_);
    }
    return out;
  }
  return v.squaredNorm() * conformal_gradient(x);
}

Vec MetricField::lower(const Vec& x, const Vec& v) const {
  if (kind_ == MetricKind::Tensor) return tensor_(x) * v;
  return conformal_factor(x) * v;
}

Vec MetricField::raise(const Vec& x, const Vec& w) const {
  if (kind_ == MetricKind::Tensor) return tensor_(x).ldlt().solve(w);
  const double rho = conformal_factor(x);
  check_positive(x, rho);
  return w / rho;
}

double MetricField::covector_norm_sq(const Vec& x, const Vec& w) const { return w.dot(raise(x, w)); }

Christoffel MetricField::numeric_christoffel(const Vec& x) const {
  Christoffel c;
  c.dim = dim_;
  std::array<Mat, kMaxDim> dg;  // dg[l] = d g / d x_l
  for (int l = 0; l < dim_; ++l) {
    Vec xp = x, xm = x;
    xp[l] += fd_step_;
    xm[l] -= fd_step_;
    dg[l] = (tensor_(xp) - tensor_(xm)) / (2.0 * fd_step_);
  }
  const Mat ginv = tensor_(x).inverse();
  for (int k = 0; k < dim_; ++k) {
    c.gamma[k] = Mat::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int l = 0; l < dim_; ++l) s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        c.gamma[k](i, j) = 0.5 * s;
      }
  }
  return c;
}

Christoffel MetricField::christoffel(const Vec& x) const {
  if (kind_ == MetricKind::Tensor) return numeric_christoffel(x);
  Christoffel c;
  c.dim = dim_;
  if (kind_ == MetricKind::Euclidean) {
    for (int k = 0; k < dim_; ++k) c.gamma[k] = Mat::Zero(dim_, dim_);
    return c;
  }
  const double rho = conformal_factor(x);
  check_positive(x, rho);
  const Vec d = conformal_gradient(x);
  for (int k = 0; k < dim_; ++k) {
    c.gamma[k] = Mat::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        if (i == k) s += d[j];
        if (j == k) s += d[i];
        if (i == j) s -= d[k];
        c.gamma[k](i, j) = s / (2.0 * rho);
      }
  }
  return c;
}

Vec MetricField::christoffel_contract(const Vec& x, const Vec& v) const {
  if (kind_ == MetricKind::Euclidean) return Vec::Zero(dim_);
  if (kind_ == MetricKind::Tensor) {
    const Christoffel c = numeric_christoffel(x);
    Vec out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = v.dot(c.gamma[k] * v);
    return out;
  }
  const double rho = conformal_factor(x);
  check_positive(x, rho);
  const Vec d = conformal_gradient(x);
  return (2.0 * v.dot(d) * v - v.squaredNorm() * d) / (2.0 * rho);
}

Christoffel christoffel_at(const MetricField& m, const Vec& x) { return m.christoffel(x); }

MetricField jacobi_metric_from_well(std::shared_ptr<const PotentialWell> well) {
  return MetricField::jacobi(std::move(well));
}

// ---------------------------------------------------------------------------
// Geodesics

GeodesicTrajectory integrate_geodesic(const MetricField& m, const Vec& x0, const Vec& v0,
                                      const GeodesicOptions& opts) {
  const int n = m.dim();
  require(x0.size() == n && v0.size() == n, ErrorCode::InvalidArgument, "geodesic: dimension mismatch");
  require(v0.norm() > 0.0, ErrorCode::InvalidArgument, "geodesic: zero initial velocity");
  require(m.positive_at(x0), ErrorCode::Precondition, "geodesic: start point outside the metric's positivity region");

  bool degenerate = false;
  ode::Rhs rhs = [&](double, const ode::State& y, ode::State& dy) {
    const Vec x = y.head(n);
    const Vec v = y.tail(n);
    dy.head(n) = v;
    if (m.is_conformal() && m.kind() != MetricKind::Euclidean &&
        !(m.conformal_factor(x) > opts.min_conformal_factor)) {
      degenerate = true;
      dy.tail(n).setConstant(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    dy.tail(n) = -m.christoffel_contract(x, v);
  };

  ode::State y0(2 * n);
  y0.head(n) = x0;
  y0.tail(n) = v0;
  ode::Options o;
  o.rtol = opts.rtol;
  o.atol = opts.atol;
  o.h0 = opts.h;
  o.record = opts.record;
  o.max_steps = 2'000'000;
  std::optional<ode::Event> ev;
  if (opts.crossing) {
    ev = ode::Event{[&](double, const ode::State& y) { return opts.crossing(Vec(y.head(n))); },
                    ode::Crossing::Rising, 1e-10};
  }
  const ode::Result r = ode::integrate(rhs, 0.0, y0, opts.t_max, o, ev);

  GeodesicTrajectory out;
  out.t = r.t;
  out.x.reserve(r.y.size());
  out.v.reserve(r.y.size());
  for (const auto& y : r.y) {
    out.x.emplace_back(y.head(n));
    out.v.emplace_back(y.tail(n));
  }
  out.crossed = r.event_hit;
  out.truncated = r.truncated || degenerate;
  out.note = degenerate ? "metric degenerates along the trajectory" : r.note;
  return out;
}

}  // namespace ogc
