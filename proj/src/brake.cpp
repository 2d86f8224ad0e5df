#include "ogc/brake.hpp"

#include "ogc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ogc {

double dist_e_approx(const PotentialWell& w, const Vec& Q, double terminal) {
  const double E = w.energy();
  require(Q.size() == w.dim(), ErrorCode::InvalidArgument, "dist_E: dimension mismatch");
  require(w.value(Q) < E, ErrorCode::Precondition, "dist_E: point outside the well");
  require(terminal > 0.0, ErrorCode::InvalidArgument, "dist_E: terminal gap must be positive");
  const int d = w.dim();
  auto tail = [&](const Vec& x) {
    const double u = std::max(E - w.value(x), 0.0);
    return 2.0 / 3.0 * std::pow(u, 1.5) / w.gradient(x).norm();
  };
  if (E - w.value(Q) <= terminal) return tail(Q);
  require(w.gradient(Q).norm() > 1e-12, ErrorCode::Degenerate,
          "dist_E: grad V vanishes, no gradient line");

  // State (x, J) in Euclidean arclength along grad V.
  ode::Rhs rhs = [&](double, const ode::State& y, ode::State& dy) {
    const Vec x = y.head(d);
    const Vec g = w.gradient(x);
    dy.resize(d + 1);
    dy.head(d) = g / std::max(g.norm(), 1e-300);
    dy[d] = std::sqrt(std::max(E - w.value(x), 0.0));
  };
  ode::Event ev;
  ev.fn = [&](double, const ode::State& y) { return E - w.value(y.head(d)) - terminal; };
  ev.direction = ode::Crossing::Falling;
  ev.tol = 1e-3 * terminal;
  ode::Options o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  o.record = false;
  ode::State y0(d + 1);
  y0.head(d) = Q;
  y0[d] = 0.0;
  // Gradient lines of a bounded well reach V = E within a few diameters.
  const double budget = 100.0 * (w.boundary_point(Q - w.center()) - w.center()).norm() + 10.0;
  const ode::Result r = ode::integrate(rhs, 0.0, y0, budget, o, ev);
  require(r.event_hit, ErrorCode::Convergence, "dist_E: gradient line did not reach V = E");
  const ode::State& y = r.y_event;
  return y[d] + tail(y.head(d));
}

OmegaDelta build_omega_delta(std::shared_ptr<const PotentialWell> w, double delta,
                             const OmegaOptions& opt) {
  require(w != nullptr, ErrorCode::InvalidArgument, "omega_delta: null well");
  require(delta > 0.0, ErrorCode::InvalidArgument, "omega_delta: delta must be positive");
  require(opt.certify_samples >= 1, ErrorCode::InvalidArgument, "omega_delta: no samples");
  DomainDescriptor desc;
  desc.kind = "jacobi";
  desc.well = w;
  desc.jacobi_delta = delta;
  desc.delta_star = opt.width;
  MetricField metric = jacobi_metric_from_well(w);
  Domain raw = build_domain(desc);

  const double margin = concavity_margin(raw, metric, 0.0, opt.certify_samples);
  if (!(margin > 0.0) && !opt.force) {
    std::ostringstream msg;
    msg << "omega_delta: boundary not strongly concave at delta = " << delta
        << " (margin " << margin << "); use a smaller delta";
    throw Error(ErrorCode::Precondition, msg.str());
  }
  OmegaDelta out{prepare_domain(raw, metric, opt.settings), std::move(metric), delta, margin,
                 margin > 0.0};
  return out;
}

std::vector<double> maupertuis_time(const PotentialWell& w, const DiscretePath& p, double c) {
  require(c > 0.0, ErrorCode::Precondition, "maupertuis time: energy must be positive");
  const int n = p.segments();
  require(n >= 1, ErrorCode::InvalidArgument, "maupertuis time: path needs a segment");
  const double E = w.energy();
  auto f = [&](const Vec& x) {
    const double u = E - w.value(x);
    require(u > 0.0, ErrorCode::Precondition, "maupertuis time: node outside the well");
    return std::sqrt(c) / u;
  };
  std::vector<double> t(n + 1, 0.0);
  const double h = 1.0 / n;
  double fl = f(p.nodes[0]);
  for (int i = 0; i < n; ++i) {
    const double fr = f(p.nodes[i + 1]);
    const double fm = f(0.5 * (p.nodes[i] + p.nodes[i + 1]));
    t[i + 1] = t[i] + h * (fl + 4.0 * fm + fr) / (6.0 * std::sqrt(2.0));
    fl = fr;
  }
  return t;
}

Vec BrakeOrbit::at(double time) const {
  require(!t.empty(), ErrorCode::Precondition, "brake orbit: no samples");
  if (time <= t.front()) return q.front();
  if (time >= t.back()) return q.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  const double h = t[k + 1] - t[k];
  if (h <= 0.0) return q[k];
  const double s = (time - t[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * q[k] + (s3 - 2 * s2 + s) * h * qdot[k] +
         (-2 * s3 + 3 * s2) * q[k + 1] + (s3 - s2) * h * qdot[k + 1];
}

namespace {

struct Leg {
  std::vector<double> t;
  std::vector<Vec> q, qdot;
  double length = 0.0;
};

// Integrates q'' = -grad V from (x, v) until a brake point: dV/dt falls through zero
// with a vanishing velocity. Interior maxima of V along the way are stepped over.
Leg run_to_brake(const PotentialWell& w, const Vec& x, const Vec& v, const BrakeOptions& opt) {
  const int d = w.dim();
  const double E = w.energy();
  ode::Rhs rhs = [&](double, const ode::State& y, ode::State& dy) {
    const Vec q = y.head(d);
    dy.resize(2 * d + 1);
    dy.head(d) = y.segment(d, d);
    dy.segment(d, d) = -w.gradient(q);
    dy[2 * d] = std::sqrt(2.0) * std::max(E - w.value(q), 0.0);
  };
  ode::Event ev;
  ev.fn = [&](double, const ode::State& y) { return y.segment(d, d).dot(w.gradient(y.head(d))); };
  ev.direction = ode::Crossing::Falling;
  ev.tol = 1e-12;
  ode::Options o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;

  ode::State y(2 * d + 1);
  y.head(d) = x;
  y.segment(d, d) = v;
  y[2 * d] = 0.0;
  const double speed_scale = std::max(v.norm(), 1.0);
  Leg leg;
  double t0 = 0.0;
  for (int restart = 0; restart < 64; ++restart) {
    const ode::Result r = ode::integrate(rhs, t0, y, opt.t_max, o, ev);
    for (std::size_t k = leg.t.empty() ? 0 : 1; k < r.t.size(); ++k) {
      leg.t.push_back(r.t[k]);
      leg.q.push_back(r.y[k].head(d));
      leg.qdot.push_back(r.y[k].segment(d, d));
    }
    if (!r.event_hit) {
      std::ostringstream msg;
      msg << "brake orbit: no brake point within t = " << opt.t_max << " from ("
          << x.transpose() << "), last |qdot| = " << r.final_state().segment(d, d).norm()
          << (r.truncated ? ", integrator truncated: " + r.note : std::string());
      throw Error(ErrorCode::Convergence, msg.str());
    }
    y = r.y_event;
    t0 = r.t_event;
    if (y.segment(d, d).norm() <= 1e-6 * speed_scale) {
      leg.length = y[2 * d];
      return leg;
    }
  }
  throw Error(ErrorCode::Convergence, "brake orbit: too many interior turning points");
}

double point_to_polyline(const Vec& x, const std::vector<Vec>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    const Vec ab = poly[k + 1] - poly[k];
    const double l2 = ab.squaredNorm();
    const double s = l2 > 0.0 ? std::clamp((x - poly[k]).dot(ab) / l2, 0.0, 1.0) : 0.0;
    best = std::min(best, (poly[k] + s * ab - x).norm());
  }
  if (poly.size() == 1) best = (poly[0] - x).norm();
  return best;
}

}  // namespace

BrakeOrbit brake_orbit_from_ogc(const PotentialWell& w, const CriticalCurve& ogc,
                                const BrakeOptions& opt) {
  require(ogc.cls == CurveClass::OGC, ErrorCode::Precondition,
          std::string("brake orbit: curve is ") + to_string(ogc.cls) + ", not an OGC");
  const DiscretePath& p = ogc.path;
  const int n = p.segments();
  require(n >= 2, ErrorCode::InvalidArgument, "brake orbit: path needs two segments");
  require(p.dim() == w.dim(), ErrorCode::InvalidArgument, "brake orbit: dimension mismatch");
  const double E = w.energy();
  const double c = ogc.energy;
  const std::vector<double> times = maupertuis_time(w, p, c);

  // Chain rule q' = (dx/ds) / (dt/ds), one-sided second-order differences at the ends.
  auto end_velocity = [&](bool first) {
    const Vec& a = first ? p.nodes[0] : p.nodes[n];
    const Vec& b = first ? p.nodes[1] : p.nodes[n - 1];
    const Vec& e = first ? p.nodes[2] : p.nodes[n - 2];
    const Vec dxds = (first ? 1.0 : -1.0) * 0.5 * n * (-3.0 * a + 4.0 * b - e);
    const double u = E - w.value(a);
    const double dtds = std::sqrt(c) / (std::sqrt(2.0) * u);
    const Vec chain = dxds / dtds;
    const double speed = std::sqrt(2.0 * u);
    return std::make_pair(Vec(chain * (speed / chain.norm())),
                          std::abs(chain.norm() / speed - 1.0));
  };
  const auto [v0, defect] = end_velocity(true);
  const Vec vn = end_velocity(false).first;

  const Leg back = run_to_brake(w, p.nodes[0], -v0, opt);
  const Leg fwd = run_to_brake(w, p.nodes[0], v0, opt);
  const Leg check = run_to_brake(w, p.nodes[n], vn, opt);

  BrakeOrbit o;
  const double tb = back.t.back();
  for (std::size_t k = back.t.size(); k-- > 0;) {
    o.t.push_back(tb - back.t[k]);
    o.q.push_back(back.q[k]);
    o.qdot.push_back(-back.qdot[k]);
  }
  for (std::size_t k = 1; k < fwd.t.size(); ++k) {
    o.t.push_back(tb + fwd.t[k]);
    o.q.push_back(fwd.q[k]);
    o.qdot.push_back(fwd.qdot[k]);
  }
  o.brake_start = o.q.front();
  o.brake_end = o.q.back();
  o.half_period = o.t.back();
  o.brake_speed = std::max(o.qdot.front().norm(), o.qdot.back().norm());
  o.jacobi_length = back.length + fwd.length;
  for (std::size_t k = 0; k < o.t.size(); ++k)
    o.energy_residual = std::max(
        o.energy_residual, std::abs(0.5 * o.qdot[k].squaredNorm() + w.value(o.q[k]) - E));
  for (const Vec& x : p.nodes) o.ogc_deviation = std::max(o.ogc_deviation, point_to_polyline(x, o.q));
  o.end_mismatch = (check.q.back() - o.brake_end).norm();
  o.launch_speed_defect = defect;
  for (int i = 0; i <= n; ++i)
    o.time_deviation = std::max(o.time_deviation, (o.at(tb + times[i]) - p.nodes[i]).norm());
  return o;
}

double orbit_sup_distance(const BrakeOrbit& a, const BrakeOrbit& b, int samples) {
  require(samples >= 2, ErrorCode::InvalidArgument, "orbit distance: need two samples");
  double same = 0.0, flipped = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    const Vec x = a.at(s * a.half_period);
    same = std::max(same, (x - b.at(s * b.half_period)).norm());
    flipped = std::max(flipped, (x - b.at((1.0 - s) * b.half_period)).norm());
  }
  return std::min(same, flipped);
}

}  // namespace ogc
