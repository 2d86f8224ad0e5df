#include "ogc/jacobi_distance.hpp"

#include "ogc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ogc {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

using Jac = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim + 1, kMaxDim + 1>;
using Rhs1 = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim + 1, 1>;

// Quintic smoothstep on [0, 1] with two vanishing derivatives at both ends.
struct Smooth {
  double w, dw, ddw;
};

Smooth smoothstep(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const double s2 = s * s;
  return {s2 * s * (10.0 - 15.0 * s + 6.0 * s2), 30.0 * s2 * (1.0 - 2.0 * s + s2),
          60.0 * s - 180.0 * s2 + 120.0 * s2 * s};
}

}  // namespace

JacobiDistance::JacobiDistance(std::shared_ptr<const PotentialWell> well) : well_(std::move(well)) {
  require(well_ != nullptr, ErrorCode::InvalidArgument, "jacobi distance: null well");
}

NormalFlowPoint JacobiDistance::flow(const Vec& P, double t) const {
  const int n = well_->dim();
  const double E = well_->energy();
  NormalFlowPoint out;
  if (well_->is_oscillator()) {
    const auto& lam = well_->lambdas();
    out.q.resize(n);
    out.qdot.resize(n);
    out.qddot.resize(n);
    out.q_P = Mat::Zero(n, n);
    out.qdot_P = Mat::Zero(n, n);
    double pot = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = kSqrt2 * lam[i];
      const double c = std::cos(w * t), s = std::sin(w * t);
      out.q[i] = P[i] * c;
      out.qdot[i] = -P[i] * w * s;
      out.qddot[i] = -w * w * out.q[i];
      out.q_P(i, i) = c;
      out.qdot_P(i, i) = -w * s;
      pot += lam[i] * lam[i] * P[i] * P[i] * (0.5 * t + std::sin(2.0 * w * t) / (4.0 * w));
    }
    out.length = kSqrt2 * (E * t - pot);
    return out;
  }

  // State: q, qdot, dq/dP, dqdot/dP (column-major), length.
  const int m = 2 * n + 2 * n * n + 1;
  ode::State y0 = ode::State::Zero(m);
  y0.head(n) = P;
  for (int i = 0; i < n; ++i) y0[2 * n + i * n + i] = 1.0;
  ode::Rhs rhs = [&](double, const ode::State& y, ode::State& dy) {
    const Vec q = y.head(n);
    dy.head(n) = y.segment(n, n);
    dy.segment(n, n) = -well_->gradient(q);
    const Mat h = well_->hessian(q);
    Eigen::Map<const Eigen::MatrixXd> phi(y.data() + 2 * n, n, n);
    Eigen::Map<const Eigen::MatrixXd> psi(y.data() + 2 * n + n * n, n, n);
    Eigen::Map<Eigen::MatrixXd> dphi(dy.data() + 2 * n, n, n);
    Eigen::Map<Eigen::MatrixXd> dpsi(dy.data() + 2 * n + n * n, n, n);
    dphi = psi;
    dpsi = -h * phi;
    dy[m - 1] = kSqrt2 * (E - well_->value(q));
  };
  ode::Options o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  o.h0 = std::max(1e-6, std::abs(t) * 0.1);
  o.record = false;
  const ode::State y = t == 0.0 ? y0 : ode::integrate(rhs, 0.0, y0, t, o).final_state();
  out.q = y.head(n);
  out.qdot = y.segment(n, n);
  out.qddot = -well_->gradient(out.q);
  out.q_P = Eigen::Map<const Eigen::MatrixXd>(y.data() + 2 * n, n, n);
  out.qdot_P = Eigen::Map<const Eigen::MatrixXd>(y.data() + 2 * n + n * n, n, n);
  out.length = y[m - 1];
  return out;
}

double JacobiDistance::length(const Vec& P, double t) const { return flow(P, t).length; }

double JacobiDistance::time_at_length(const Vec& P, double d) const {
  require(d >= 0.0, ErrorCode::InvalidArgument, "jacobi distance: negative length");
  if (d == 0.0) return 0.0;
  // Length grows while E - V > 0, up to the turning point of the brake trajectory.
  double lo = 0.0, hi = 0.05, prev = 0.0;
  for (int k = 0;; ++k) {
    const double l = length(P, hi);
    if (l >= d) break;
    require(l > prev && k < 60, ErrorCode::Precondition,
            "jacobi distance: level is deeper than the brake trajectory reaches");
    prev = l;
    lo = hi;
    hi *= 1.5;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (length(P, mid) < d ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

JacobiDistance::Foot JacobiDistance::solve(const Vec& Q, bool with_hessian) const {
  const int n = well_->dim();
  const double E = well_->energy();
  const double u = E - well_->value(Q);
  require(u > 0.0, ErrorCode::Precondition, "jacobi distance: point outside the well");
  const Vec gq = well_->gradient(Q);
  require(gq.norm() > 1e-12, ErrorCode::Convergence, "jacobi distance: grad V vanishes");

  // Initial foot: follow grad V to the level V = E.
  const Vec dir = gq.normalized();
  double lo = 0.0, hi = u / gq.norm();
  for (int k = 0; well_->value(Q + hi * dir) < E; ++k) {
    require(k < 60, ErrorCode::Convergence, "jacobi distance: no boundary along grad V");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (well_->value(Q + mid * dir) < E ? lo : hi) = mid;
  }
  const double s0 = 0.5 * (lo + hi);
  Vec P = Q + s0 * dir;
  double tau = s0 / std::max(well_->gradient(P).norm(), 1e-12);  // |Q - P| ~ |grad V| t^2 / 2

  auto assemble = [&](const Vec& p, double ta, NormalFlowPoint& fp, Rhs1& r, Jac& J) {
    const double t = std::sqrt(2.0 * std::max(ta, 0.0));
    fp = flow(p, t);
    r.resize(n + 1);
    r.head(n) = fp.q - Q;
    r[n] = well_->value(p) - E;
    J.setZero(n + 1, n + 1);
    J.topLeftCorner(n, n) = fp.q_P;
    // d q / d tau = qdot / t, which tends to -grad V(P) as t -> 0.
    J.block(0, n, n, 1) = t > 1e-9 ? Vec(fp.qdot / t) : Vec(-well_->gradient(p));
    J.block(n, 0, 1, n) = well_->gradient(p).transpose();
  };

  NormalFlowPoint fp;
  Rhs1 r;
  Jac J;
  assemble(P, tau, fp, r, J);
  double res = r.norm();
  Foot foot;
  const double scale = std::max(1.0, Q.norm());
  int it = 0;
  bool polished = false;
  for (; it < 60; ++it) {
    if (res <= 1e-14 * scale) {
      if (polished) break;
      polished = true;
    }
    const Rhs1 dz = -J.partialPivLu().solve(r);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Vec P1 = P + step * dz.head(n);
      double tau1 = tau + step * dz[n];
      if (tau1 < 0.0) tau1 = 0.25 * tau;
      NormalFlowPoint fp1;
      Rhs1 r1;
      Jac J1;
      assemble(P1, tau1, fp1, r1, J1);
      const double res1 = r1.norm();
      if (std::isfinite(res1) && (res1 < res || res1 <= 1e-14 * scale)) {
        P = P1;
        tau = tau1;
        fp = fp1;
        r = r1;
        J = J1;
        res = res1;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  foot.iterations = it;
  foot.converged = res <= 1e-10 * scale;
  require(foot.converged, ErrorCode::Convergence, "jacobi distance: foot-point Newton failed");

  const double t = std::sqrt(2.0 * tau);
  foot.P = P;
  foot.t = t;
  foot.dist = fp.length;
  foot.grad = fp.qdot / kSqrt2;
  if (with_hessian) {
    // [dP; dtau] = J^{-1} [dQ; 0]; d qdot = qdot_P dP + (qddot / t) dtau.
    Jac rhs = Jac::Zero(n + 1, n);
    rhs.topRows(n).setIdentity();
    const Jac X = J.partialPivLu().solve(rhs);
    const Vec g_tau = t > 1e-9 ? Vec(fp.qddot / t) : Vec(Vec::Zero(n));
    Mat h = fp.qdot_P * X.topRows(n) + g_tau * X.row(n);
    foot.hess = 0.5 * (h + h.transpose()) / kSqrt2;
  }
  return foot;
}

// ---------------------------------------------------------------------------

JacobiLevelSet::JacobiLevelSet(std::shared_ptr<const PotentialWell> well, double delta,
                               double width)
    : well_(std::move(well)), dist_(well_), delta_(delta), width_(width) {
  require(delta > 0.0 && width > 0.0, ErrorCode::InvalidArgument,
          "jacobi domain: delta and strip width must be positive");
  center_ = well_->center();
  const double E = well_->energy();
  const double u_center = E - well_->value(center_);

  const int dim = well_->dim();
  const int count = dim == 2 ? 48 : 160;
  const auto dirs = sphere_directions(dim, count);
  std::vector<Vec> feet;
  feet.reserve(dirs.size());
  double u_star = 0.0;
  for (const Vec& d : dirs) {
    const Vec P = well_->boundary_point(d);
    double t = 0.0;
    try {
      t = dist_.time_at_length(P, delta + width);
    } catch (const Error&) {
      throw Error(ErrorCode::Precondition,
                  "jacobi domain: delta exceeds the Jacobi depth of the well");
    }
    u_star = std::max(u_star, E - well_->value(dist_.flow(P, t).q));
    feet.push_back(P);
  }
  u1_ = 1.05 * u_star;
  require(u1_ < 0.8 * u_center, ErrorCode::Precondition,
          "jacobi domain: delta too large for this well (blend band reaches the center)");

  u2_ = std::min(1.6 * u1_, u1_ + 0.25 * (u_center - u1_));

  // Affine far field matched to the exact distance on the band edges.
  auto level_point = [&](const Vec& P, double u_target) {
    double lo = 0.0, hi = 0.05;
    while (E - well_->value(dist_.flow(P, hi).q) < u_target) {
      lo = hi;
      hi *= 1.5;
      require(hi < 1e3, ErrorCode::Degenerate, "jacobi domain: level not reached");
    }
    for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (E - well_->value(dist_.flow(P, mid).q) < u_target ? lo : hi) = mid;
    }
    return dist_.flow(P, 0.5 * (lo + hi));
  };
  double d1_min = std::numeric_limits<double>::infinity();
  double d2_sum = 0.0;
  for (const Vec& P : feet) {
    d1_min = std::min(d1_min, level_point(P, u1_).length);
    const NormalFlowPoint f2 = level_point(P, u2_);
    const JacobiDistance::Foot check = dist_.solve(f2.q, false);
    require(std::abs(check.dist - f2.length) < 1e-8, ErrorCode::Degenerate,
            "jacobi domain: boundary normal flow is not injective on the blend band");
    d2_sum += f2.length;
  }
  require(d1_min >= delta + width, ErrorCode::Degenerate,
          "jacobi domain: blend band overlaps the exact strip");
  far_offset_ = d1_min;
  far_slope_ = std::max((d2_sum / feet.size() - d1_min) / (u2_ - u1_), 1e-3);
}

PhiJet JacobiLevelSet::outside_jet(const Vec& x) const {
  const double excess = well_->value(x) - well_->energy();
  Vec g = well_->gradient(x);
  const double gn = std::max(g.norm(), 1e-12);
  PhiJet j;
  j.value = delta_ + excess / gn;
  j.grad = g / gn;
  j.hess = Mat::Zero(x.size(), x.size());
  return j;
}

double JacobiLevelSet::value(const Vec& x) const {
  const double u = well_->energy() - well_->value(x);
  if (u <= 0.0) return outside_jet(x).value;
  const double far = far_offset_ + far_slope_ * (u - u1_);
  if (u >= u2_) return delta_ - far;
  const double exact = dist_.solve(x, false).dist;
  if (u <= u1_) return delta_ - exact;
  const Smooth s = smoothstep((u - u1_) / (u2_ - u1_));
  return delta_ - (s.w * (exact - far) + far);
}

PhiJet JacobiLevelSet::jet(const Vec& x, bool with_hessian) const {
  const int n = static_cast<int>(x.size());
  const double u = well_->energy() - well_->value(x);
  if (u <= 0.0) return outside_jet(x);

  const Vec du = -well_->gradient(x);
  const Mat hu = with_hessian ? Mat(-well_->hessian(x)) : Mat::Zero(n, n);
  const double far = far_offset_ + far_slope_ * (u - u1_);
  PhiJet j;
  if (u >= u2_) {
    j.value = delta_ - far;
    j.grad = -far_slope_ * du;
    j.hess = -far_slope_ * hu;
    return j;
  }
  const JacobiDistance::Foot f = dist_.solve(x, with_hessian);
  if (u <= u1_) {
    j.value = delta_ - f.dist;
    j.grad = -f.grad;
    j.hess = with_hessian ? Mat(-f.hess) : Mat::Zero(n, n);
    return j;
  }
  // D = w (exact - far) + far, w a smoothstep in u.
  const double span = u2_ - u1_;
  const Smooth s = smoothstep((u - u1_) / span);
  const double w1 = s.dw / span, w2 = s.ddw / (span * span);
  const double diff = f.dist - far;
  const Vec gdiff = f.grad - far_slope_ * du;
  const Vec gD = w1 * diff * du + s.w * gdiff + far_slope_ * du;
  j.value = delta_ - (s.w * diff + far);
  j.grad = -gD;
  if (with_hessian) {
    const Mat hdiff = f.hess - far_slope_ * hu;
    const Mat hD = w2 * diff * du * du.transpose() +
                   w1 * (du * gdiff.transpose() + gdiff * du.transpose()) + w1 * diff * hu +
                   s.w * hdiff + far_slope_ * hu;
    j.hess = -hD;
  } else {
    j.hess = Mat::Zero(n, n);
  }
  return j;
}

Vec JacobiLevelSet::boundary_point(const Vec& direction) const {
  const Vec u = direction.normalized();
  const Vec outer = well_->boundary_point(u);
  double lo = 0.0, hi = (outer - center_).norm();
  for (int it = 0; it < 100 && hi - lo > 1e-3 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(center_ + mid * u) < 0.0 ? lo : hi) = mid;
  }
  // Newton along the ray, falling back to bisection when a step leaves the bracket.
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const PhiJet j = jet(center_ + r * u, false);
    if (std::abs(j.value) <= 1e-14) break;
    (j.value < 0.0 ? lo : hi) = r;
    const double d = j.grad.dot(u);
    const double next = std::abs(d) > 1e-12 ? r - j.value / d : 0.5 * (lo + hi);
    r = next > lo && next < hi ? next : 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * hi) break;
  }
  return center_ + r * u;
}

}  // namespace ogc
