#include "ogc/domain.hpp"

#include "ogc/jacobi_distance.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ogc {
namespace {

// Orthonormal basis of the complement of the unit vector n (columns).
Mat tangent_basis(const Vec& n) {
  const int d = static_cast<int>(n.size());
  Eigen::HouseholderQR<Mat> qr(n);
  Mat q = qr.householderQ();
  return q.rightCols(d - 1);
}

// Hessian of the signed distance at a point phi away from a boundary with foot
// normal grad_f and Hess f there: W (I + phi W)^{-1} on the tangent space.
Mat distance_hessian(const Vec& grad_f, const Mat& hess_f, double phi) {
  const double gn = grad_f.norm();
  const Mat B = tangent_basis(grad_f / gn);
  const Mat W = B.transpose() * hess_f * B / gn;
  const Mat M = Mat::Identity(W.rows(), W.cols()) + phi * W;
  Mat h = W * M.inverse();
  h = 0.5 * (h + h.transpose());
  return B * h * B.transpose();
}

struct Surface {
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

// Newton on the closest-point conditions y - p = mu grad f(p), f(p) = 0.
Vec polish_foot(const Surface& s, const Vec& y, Vec p) {
  const int n = static_cast<int>(y.size());
  using Big = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim + 1, kMaxDim + 1>;
  using BigV = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim + 1, 1>;
  Vec g = s.grad(p);
  double mu = (y - p).dot(g) / g.squaredNorm();
  auto residual = [&](const Vec& pp, double m, const Vec& gg) {
    BigV r(n + 1);
    r.head(n) = pp - y + m * gg;
    r[n] = s.f(pp);
    return r;
  };
  BigV r = residual(p, mu, g);
  for (int it = 0; it < 30; ++it) {
    const double res = r.norm();
    if (res < 1e-15 * std::max(1.0, y.norm())) break;
    Big J = Big::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = Mat::Identity(n, n) + mu * s.hess(p);
    J.block(0, n, n, 1) = g;
    J.block(n, 0, 1, n) = g.transpose();
    const BigV dz = -J.partialPivLu().solve(r);
    double step = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec p1 = p + step * dz.head(n);
      const double mu1 = mu + step * dz[n];
      const Vec g1 = s.grad(p1);
      const BigV r1 = residual(p1, mu1, g1);
      if (r1.norm() < res) {
        p = p1;
        mu = mu1;
        g = g1;
        r = r1;
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
  }
  return p;
}

PhiJet jet_from_foot(const Surface& s, const Vec& y, const Vec& p, bool with_hessian) {
  const Vec gf = s.grad(p);
  const Vec n = gf.normalized();
  PhiJet j;
  j.value = (y - p).dot(n);
  j.grad = n;
  j.hess = with_hessian ? distance_hessian(gf, s.hess(p), j.value)
                        : Mat::Zero(y.size(), y.size());
  return j;
}

// ---------------------------------------------------------------------------

class DiskLevelSet final : public LevelSet {
 public:
  DiskLevelSet(Vec c, double r) : c_(std::move(c)), r_(r) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  std::string kind() const override { return "disk"; }
  double value(const Vec& x) const override { return (x - c_).norm() - r_; }
  PhiJet jet(const Vec& x, bool with_hessian) const override {
    const int n = dim();
    const Vec d = x - c_;
    const double r = d.norm();
    PhiJet j;
    j.value = r - r_;
    j.grad = r > 0.0 ? Vec(d / r) : Vec(Vec::Zero(n));
    j.hess = Mat::Zero(n, n);
    if (with_hessian && r > 0.0) j.hess = (Mat::Identity(n, n) - j.grad * j.grad.transpose()) / r;
    return j;
  }
  Vec center() const override { return c_; }
  double exact_width() const override { return r_; }
  Vec boundary_point(const Vec& u) const override { return c_ + r_ * u.normalized(); }

 private:
  Vec c_;
  double r_;
};

class EllipsoidLevelSet final : public LevelSet {
 public:
  explicit EllipsoidLevelSet(std::vector<double> a) : a_(std::move(a)) {
    const int n = dim();
    surface_.f = [this](const Vec& x) {
      double s = -1.0;
      for (int i = 0; i < dim(); ++i) s += x[i] * x[i] / (a_[i] * a_[i]);
      return s;
    };
    surface_.grad = [this](const Vec& x) {
      Vec g(dim());
      for (int i = 0; i < dim(); ++i) g[i] = 2.0 * x[i] / (a_[i] * a_[i]);
      return g;
    };
    surface_.hess = [this, n](const Vec&) {
      Mat h = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) h(i, i) = 2.0 / (a_[i] * a_[i]);
      return h;
    };
    const double amin = *std::min_element(a_.begin(), a_.end());
    const double amax = *std::max_element(a_.begin(), a_.end());
    width_ = 0.9 * amin * amin / amax;  // below the smallest focal distance
  }

  int dim() const override { return static_cast<int>(a_.size()); }
  std::string kind() const override { return "ellipse"; }
  double value(const Vec& x) const override { return jet(x, false).value; }
  PhiJet jet(const Vec& x, bool with_hessian) const override {
    return jet_from_foot(surface_, x, foot(x), with_hessian);
  }
  Vec center() const override { return Vec::Zero(dim()); }
  double exact_width() const override { return width_; }
  Vec boundary_point(const Vec& u) const override {
    return u / std::sqrt(surface_.f(u) + 1.0);
  }

  // Closest boundary point, from the monotone root of
  // sum (a_i y_i / (t + a_i^2))^2 = 1 on the branch t > -a_min^2.
  Vec foot(const Vec& y) const {
    const int n = dim();
    Vec z = y.cwiseAbs();
    int kmin = 0;
    for (int i = 1; i < n; ++i)
      if (a_[i] < a_[kmin]) kmin = i;
    std::vector<bool> active(n);
    bool any = false;
    double amin_active = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      active[i] = z[i] > 1e-13 * a_[i];
      if (!active[i]) z[i] = 0.0;
      any = any || active[i];
      if (active[i]) amin_active = std::min(amin_active, a_[i]);
    }
    Vec p = Vec::Zero(n);
    if (!any) {
      p[kmin] = a_[kmin];
      return p;
    }
    auto F = [&](double t) {
      double s = -1.0;
      for (int i = 0; i < n; ++i)
        if (active[i]) s += std::pow(a_[i] * z[i] / (t + a_[i] * a_[i]), 2);
      return s;
    };
    const double amin2 = a_[kmin] * a_[kmin];
    if (!active[kmin] && amin_active > a_[kmin] && F(-amin2) < 0.0) {
      // Off the medial axis branch: the foot leaves the coordinate plane z_kmin = 0.
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        p[i] = a_[i] * a_[i] * z[i] / (a_[i] * a_[i] - amin2);
        s += std::pow(p[i] / a_[i], 2);
      }
      p[kmin] = a_[kmin] * std::sqrt(std::max(0.0, 1.0 - s));
    } else {
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        if (active[i]) sum += std::pow(a_[i] * z[i], 2);
      double lo = -amin_active * amin_active, hi = std::sqrt(sum) - amin_active * amin_active;
      if (!active[kmin] && amin_active > a_[kmin]) lo = -amin2;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) > 0.0 ? lo : hi) = mid;
      }
      const double t = 0.5 * (lo + hi);
      for (int i = 0; i < n; ++i)
        if (active[i]) p[i] = a_[i] * a_[i] * z[i] / (t + a_[i] * a_[i]);
    }
    p = polish_foot(surface_, z, p);
    for (int i = 0; i < n; ++i)
      if (y[i] < 0.0) p[i] = -p[i];
    return p;
  }

 private:
  std::vector<double> a_;
  Surface surface_;
  double width_ = 0.0;
};

class ImplicitLevelSet final : public LevelSet {
 public:
  ImplicitLevelSet(int dim, std::vector<Monomial> terms, double width)
      : poly_(PotentialWell::polynomial(dim, std::move(terms), 0.0)) {
    surface_.f = [this](const Vec& x) { return poly_.value(x); };
    surface_.grad = [this](const Vec& x) { return poly_.gradient(x); };
    surface_.hess = [this](const Vec& x) { return poly_.hessian(x); };
    center_ = poly_.center();
    require(poly_.value(center_) < 0.0, ErrorCode::Degenerate,
            "implicit domain: f has no negative values (empty region)");
    const int count = dim == 2 ? 1024 : 4096;
    for (const Vec& u : sphere_directions(dim, count)) {
      const Vec b = poly_.boundary_point(u);
      require(poly_.gradient(b).norm() > 1e-8, ErrorCode::Degenerate,
              "implicit domain: grad f vanishes on the boundary");
      samples_.push_back(b);
    }
    width_ = width > 0.0 ? width : estimate_width();
  }

  int dim() const override { return poly_.dim(); }
  std::string kind() const override { return "implicit"; }
  double value(const Vec& x) const override { return jet(x, false).value; }
  PhiJet jet(const Vec& x, bool with_hessian) const override {
    return jet_from_foot(surface_, x, foot(x), with_hessian);
  }
  Vec center() const override { return center_; }
  double exact_width() const override { return width_; }
  Vec boundary_point(const Vec& u) const override { return poly_.boundary_point(u); }

  Vec foot(const Vec& y) const {
    std::size_t best = 0;
    double d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const double d = (samples_[i] - y).squaredNorm();
      if (d < d2) {
        d2 = d;
        best = i;
      }
    }
    return polish_foot(surface_, y, samples_[best]);
  }

 private:
  PotentialWell poly_;
  Surface surface_;
  Vec center_;
  std::vector<Vec> samples_;
  double width_ = 0.0;

  // Depth along inward normals up to which phi stays exact, and the focal bound.
  double estimate_width() const {
    double kmax = 0.0;
    double cut = std::numeric_limits<double>::infinity();
    const std::size_t stride = std::max<std::size_t>(1, samples_.size() / 128);
    for (std::size_t i = 0; i < samples_.size(); i += stride) {
      const Vec& b = samples_[i];
      const Vec gf = poly_.gradient(b);
      const Vec n = gf.normalized();
      const Mat B = tangent_basis(n);
      const Mat W = B.transpose() * poly_.hessian(b) * B / gf.norm();
      Eigen::SelfAdjointEigenSolver<Mat> es(W);
      kmax = std::max(kmax, es.eigenvalues().cwiseAbs().maxCoeff());
      double lo = 0.0, hi = (b - center_).norm();
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec x = b - mid * n;
        (std::abs((x - foot(x)).norm() - mid) < 1e-9 ? lo : hi) = mid;
      }
      cut = std::min(cut, lo);
    }
    double w = 0.9 * cut;
    if (kmax > 0.0) w = std::min(w, 0.9 / kmax);
    return w;
  }
};

Mat metric_tangent_gram(const MetricField& m, const Vec& x, const Mat& B) {
  return B.transpose() * m.g(x) * B;
}

}  // namespace

Vec LevelSet::boundary_point(const Vec& direction) const {
  const Vec c = center();
  const Vec u = direction.normalized();
  double lo = 0.0, hi = 1e-3;
  for (int k = 0; value(c + hi * u) < 0.0; ++k) {
    require(k < 80, ErrorCode::Degenerate, "domain: region is unbounded along a ray");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(c + mid * u) < 0.0 ? lo : hi) = mid;
  }
  return c + 0.5 * (lo + hi) * u;
}

Domain::Domain(std::shared_ptr<const LevelSet> level, DomainConstants constants)
    : level_(std::move(level)), constants_(std::move(constants)) {
  require(level_ != nullptr, ErrorCode::InvalidArgument, "domain: null level set");
}

Vec Domain::project_to_boundary(const Vec& x, double tol) const {
  Vec y = x;
  for (int it = 0; it < 50; ++it) {
    const PhiJet j = level_->jet(y, false);
    if (std::abs(j.value) <= tol) return y;
    const double g2 = j.grad.squaredNorm();
    require(g2 > 1e-24, ErrorCode::Projection, "domain: projection hit a critical point of phi");
    y -= (j.value / g2) * j.grad;
  }
  require(std::abs(phi(y)) <= 1e3 * tol, ErrorCode::Projection,
          "domain: boundary projection did not converge");
  return y;
}

Vec Domain::push_inward(const Vec& b, double depth) const {
  if (depth <= 0.0) return b;
  const PhiJet jb = level_->jet(b, false);
  const Vec n = jb.grad.normalized();
  const double target = jb.value - depth;
  // phi decreases along -n near the boundary; bracket then bisect with Newton steps.
  double lo = 0.0, hi = (1.0 + 1e-3) * depth / std::max(jb.grad.norm(), 1e-3);
  for (int k = 0; level_->value(b - hi * n) > target; ++k) {
    require(k < 60, ErrorCode::Projection, "domain: level not reached along the inward normal");
    lo = hi;
    hi *= 1.5;
  }
  double s = hi;
  for (int it = 0; it < 100; ++it) {
    const PhiJet j = level_->jet(b - s * n, false);
    const double f = j.value - target;
    if (std::abs(f) < 1e-13) break;
    (f > 0.0 ? lo : hi) = s;
    const double slope = -j.grad.dot(n);
    double next = slope < 0.0 ? s - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    s = next;
  }
  return b - s * n;
}

std::pair<Vec, Vec> Domain::bounding_box(int samples) const {
  Vec lo = Vec::Constant(dim(), std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& u : sphere_directions(dim(), samples)) {
    const Vec b = boundary_point(u);
    lo = lo.cwiseMin(b);
    hi = hi.cwiseMax(b);
  }
  return {lo, hi};
}

Domain build_domain(const DomainDescriptor& desc) {
  std::shared_ptr<const LevelSet> level;
  if (desc.kind == "disk") {
    require(desc.radius > 0.0, ErrorCode::InvalidArgument, "disk: radius must be positive");
    Vec c = desc.center.size() > 0 ? desc.center : Vec(Vec::Zero(2));
    require(c.size() >= 1 && c.size() <= kMaxDim, ErrorCode::InvalidArgument, "disk: bad dimension");
    level = std::make_shared<DiskLevelSet>(c, desc.radius);
  } else if (desc.kind == "ellipse") {
    const auto& a = desc.semi_axes;
    require(a.size() >= 2 && static_cast<int>(a.size()) <= kMaxDim, ErrorCode::InvalidArgument,
            "ellipse: need 2 to 4 semi-axes");
    for (double ai : a)
      require(ai > 0.0 && std::isfinite(ai), ErrorCode::InvalidArgument,
              "ellipse: semi-axes must be positive");
    level = std::make_shared<EllipsoidLevelSet>(a);
  } else if (desc.kind == "implicit") {
    require(desc.dim >= 2 && desc.dim <= kMaxDim, ErrorCode::InvalidArgument,
            "implicit: bad dimension");
    require(!desc.terms.empty(), ErrorCode::InvalidArgument, "implicit: empty polynomial");
    level = std::make_shared<ImplicitLevelSet>(desc.dim, desc.terms, desc.delta_star);
  } else if (desc.kind == "jacobi") {
    require(desc.well != nullptr, ErrorCode::InvalidArgument, "jacobi: missing well");
    require(desc.jacobi_delta > 0.0, ErrorCode::InvalidArgument, "jacobi: delta must be positive");
    const double width = desc.delta_star > 0.0 ? desc.delta_star : 0.5 * desc.jacobi_delta;
    level = std::make_shared<JacobiLevelSet>(desc.well, desc.jacobi_delta, width);
  } else {
    throw Error(ErrorCode::InvalidArgument, "domain: unknown kind '" + desc.kind + "'");
  }
  DomainConstants c;
  c.delta_star = level->exact_width();
  c.delta0 = c.delta_star;
  c.x0 = level->center();
  return Domain(level, c);
}

std::vector<Vec> sample_strip(const Domain& dom, double width, int samples) {
  require(samples >= 1, ErrorCode::InvalidArgument, "strip sampling: no samples requested");
  require(width >= 0.0, ErrorCode::InvalidArgument, "strip sampling: negative width");
  const int layers = width > 0.0 ? std::clamp(samples / 64, 1, 8) : 1;
  const int per_layer = (samples + layers - 1) / layers;
  // Stay inside the open strip where the distance is smooth.
  const double reach = std::min(width, 0.99 * dom.level_set().exact_width());
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(layers) * per_layer);
  for (const Vec& u : sphere_directions(dom.dim(), per_layer)) {
    const Vec b = dom.boundary_point(u);
    for (int k = 0; k < layers; ++k) {
      const double depth = layers == 1 ? 0.0 : reach * k / (layers - 1);
      pts.push_back(dom.push_inward(b, depth));
    }
  }
  return pts;
}

double tangential_hessian_max(const Domain& dom, const MetricField& metric, const Vec& x) {
  const PhiJet j = dom.jet(x, true);
  const double gn = j.grad.norm();
  require(gn > 0.0 && j.hess.allFinite(), ErrorCode::Evaluation,
          "concavity: phi has no usable gradient or Hessian at a sample");
  Mat h = j.hess;
  if (metric.kind() != MetricKind::Euclidean) {
    const Christoffel ch = metric.christoffel(x);
    for (int k = 0; k < metric.dim(); ++k) h -= j.grad[k] * ch.gamma[k];
  }
  const Mat B = tangent_basis(j.grad / gn);
  const Mat A = B.transpose() * h * B;
  const Mat G = metric_tangent_gram(metric, x, B);
  if (A.rows() == 1) return A(0, 0) / G(0, 0);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, G);
  return es.eigenvalues().maxCoeff();
}

double concavity_margin(const Domain& dom, const MetricField& metric, double width, int samples) {
  require(samples >= 1, ErrorCode::InvalidArgument, "concavity: empty sample set");
  require(width <= dom.constants().delta_star * (1.0 + 1e-12), ErrorCode::Precondition,
          "concavity: strip wider than the exact-distance strip");
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec& q : sample_strip(dom, width, samples))
    worst = std::max(worst, tangential_hessian_max(dom, metric, q));
  return -worst;
}

std::vector<double> geometric_ladder(double top, double factor, int count) {
  require(top > 0.0 && factor > 0.0 && factor < 1.0 && count >= 1, ErrorCode::InvalidArgument,
          "ladder: need top > 0, factor in (0,1), count >= 1");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(top * std::pow(factor, k));
  return out;
}

Delta0Result compute_delta0(const Domain& dom, const MetricField& metric,
                            const std::vector<double>& ladder, int samples) {
  require(!ladder.empty(), ErrorCode::InvalidArgument, "delta0: empty ladder");
  std::vector<double> rungs = ladder;
  std::sort(rungs.begin(), rungs.end(), std::greater<>());
  const double dstar = dom.constants().delta_star;
  Delta0Result out;
  for (double d : rungs) {
    if (d > dstar * (1.0 + 1e-12)) continue;
    const double m = concavity_margin(dom, metric, d, samples);
    out.rungs.push_back({d, m});
    if (m > 0.0) {
      out.delta0 = d;
      out.concave = true;
      out.margin = m;
      return out;
    }
  }
  require(!out.rungs.empty(), ErrorCode::InvalidArgument, "delta0: every rung exceeds delta_star");
  out.delta0 = dstar;
  out.concave = false;
  out.margin = out.rungs.back().margin;
  return out;
}

K0Result compute_K0(const Domain& dom, const MetricField& metric, int samples, double safety) {
  require(samples >= 1, ErrorCode::InvalidArgument, "K0: no samples");
  require(safety >= 1.0, ErrorCode::InvalidArgument, "K0: safety factor must be >= 1");
  double kmax = 0.0;
  auto visit = [&](const Vec& x) {
    const PhiJet j = dom.jet(x, false);
    if (j.value > 0.0) return;
    kmax = std::max(kmax, std::sqrt(metric.covector_norm_sq(x, j.grad)));
  };
  const int n = dom.dim();
  const int boundary = std::max(1, samples / 4);
  for (const Vec& u : sphere_directions(n, boundary)) visit(dom.boundary_point(u));
  const auto [lo, hi] = dom.bounding_box();
  const int per_axis = std::max(2, static_cast<int>(std::pow(samples - boundary, 1.0 / n)));
  std::vector<int> idx(n, 0);
  for (;;) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / per_axis;
    visit(x);
    int i = 0;
    while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == n) break;
  }
  K0Result out;
  out.sampled = kmax;
  out.K0 = std::max(1.0, kmax) * safety;
  return out;
}

double choose_delta1(const Domain& dom, const Vec& x0, double rho0, double delta0, double K0,
                     int samples) {
  require(rho0 > 0.0 && delta0 > 0.0, ErrorCode::InvalidArgument,
          "delta1: rho0 and delta0 must be positive");
  require(dom.phi(x0) + rho0 * K0 < 0.0, ErrorCode::Precondition,
          "delta1: exclusion ball is not inside the domain");
  double m = -dom.phi(x0);
  for (const Vec& u : sphere_directions(dom.dim(), samples)) m = std::min(m, -dom.phi(x0 + rho0 * u));
  require(m > 0.0, ErrorCode::Precondition, "delta1: exclusion ball is not inside the domain");
  double d = delta0;
  for (int k = 0; k < 60; ++k) {
    d *= 0.5;
    if (d < m) return d;
  }
  throw Error(ErrorCode::Degenerate, "delta1: no ladder rung clears the exclusion ball");
}

bool strip_avoids_ball(const Domain& dom, const Vec& x0, double rho0, double delta1, int samples) {
  if (dom.phi(x0) >= -delta1) return false;
  for (double frac : {0.25, 0.5, 0.75, 1.0})
    for (const Vec& u : sphere_directions(dom.dim(), samples))
      if (dom.phi(x0 + frac * rho0 * u) >= -delta1) return false;
  return true;
}

Domain prepare_domain(const Domain& dom, const MetricField& metric, const DomainSettings& s) {
  require(metric.dim() == dom.dim(), ErrorCode::InvalidArgument, "domain: metric dimension mismatch");
  DomainConstants c = dom.constants();
  c.delta_star = dom.level_set().exact_width();
  const std::vector<double> ladder =
      s.ladder.empty() ? geometric_ladder(c.delta_star, 0.5, 8) : s.ladder;
  const Delta0Result d0 = compute_delta0(dom, metric, ladder, s.concavity_samples);
  c.delta0 = d0.delta0;
  c.concave = d0.concave;
  c.concavity_margin = d0.margin;
  const K0Result k0 = compute_K0(dom, metric, s.k0_samples, s.k0_safety);
  c.K0 = k0.K0;
  c.K0_sampled = k0.sampled;
  c.x0 = s.x0 ? *s.x0 : dom.center();
  c.rho0 = s.rho0;
  if (c.rho0 <= 0.0) {
    double inscribed = std::numeric_limits<double>::infinity();
    for (const Vec& u : sphere_directions(dom.dim(), 128))
      inscribed = std::min(inscribed, (dom.boundary_point(u) - c.x0).norm());
    c.rho0 = 0.25 * inscribed;
  }
  c.delta1 = choose_delta1(dom, c.x0, c.rho0, c.delta0, c.K0);
  return dom.with_constants(c);
}

const char* to_string(SpecialKind k) {
  return k == SpecialKind::TangentTangent ? "tangent-tangent" : "tangent-orthogonal";
}

SpecialScan scan_special_geodesics_2d(const Domain& dom, const MetricField& metric,
                                      double length_bound, int grid, const Vec& x0, double rho0,
                                      double angle_tol) {
  require(dom.dim() == 2, ErrorCode::Unsupported, "special geodesic scan: only dimension 2");
  require(grid >= 1, ErrorCode::InvalidArgument, "special geodesic scan: empty grid");
  SpecialScan out;
  if (length_bound <= 0.0) return out;
  const double sin_tol = std::sin(angle_tol), cos_tol = std::cos(angle_tol);

  auto seg_dist = [&](const Vec& a, const Vec& b) {
    const Vec ab = b - a;
    const double l2 = ab.squaredNorm();
    const double t = l2 > 0.0 ? std::clamp((x0 - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    return (a + t * ab - x0).norm();
  };

  for (const Vec& u : sphere_directions(2, grid)) {
    const Vec b = dom.boundary_point(u);
    const Vec nrm = dom.grad_phi(b).normalized();
    const Vec tan = make_vec({-nrm[1], nrm[0]});
    const std::pair<Vec, bool> shots[] = {{tan, true}, {Vec(-tan), true}, {Vec(-nrm), false}};
    for (const auto& [dir, tangential] : shots) {
      ++out.shots;
      const Vec v0 = dir / std::sqrt(metric.quad(b, dir));
      GeodesicOptions o;
      o.t_max = length_bound;
      o.crossing = [&dom](const Vec& x) { return dom.phi(x); };
      o.rtol = 1e-10;
      o.atol = 1e-12;
      GeodesicTrajectory tr;
      try {
        tr = integrate_geodesic(metric, b, v0, o);
      } catch (const Error&) {
        continue;
      }
      if (!tr.crossed || tr.x.size() < 3) continue;
      bool left = false;
      for (std::size_t i = 1; i + 1 < tr.x.size(); ++i) left = left || dom.phi(tr.x[i]) > 1e-9;
      const double len = tr.t.back();
      if (left || len < 1e-3 * length_bound) continue;
      const Vec& xe = tr.x.back();
      const Vec& ve = tr.v.back();
      const Vec ge = dom.grad_phi(xe);
      const double c = std::abs(ge.dot(ve)) /
                       (std::sqrt(metric.covector_norm_sq(xe, ge)) * std::sqrt(metric.quad(xe, ve)));
      SpecialGeodesic sg;
      if (tangential && c <= sin_tol) {
        sg.kind = SpecialKind::TangentTangent;
      } else if ((tangential && c >= cos_tol) || (!tangential && c <= sin_tol)) {
        sg.kind = SpecialKind::TangentOrthogonal;
      } else {
        continue;
      }
      sg.start = b;
      sg.end = xe;
      sg.length = len;
      sg.end_cosine = c;
      sg.points = tr.x;
      for (std::size_t i = 0; i + 1 < tr.x.size() && !sg.hits_ball; ++i)
        sg.hits_ball = seg_dist(tr.x[i], tr.x[i + 1]) <= rho0;
      out.avoids_ball = out.avoids_ball && !sg.hits_ball;
      out.chords.push_back(std::move(sg));
    }
  }
  return out;
}

}  // namespace ogc
