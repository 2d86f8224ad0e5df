#include "ogc/oracle.hpp"

#include "ogc/path_space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace ogc {

namespace {

struct ShotRun {
  Shot shot;
  GeodesicTrajectory traj;
};

Vec direction(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  if (std::abs(c) < 1e-12) c = 0.0;
  if (std::abs(s) < 1e-12) s = 0.0;
  return make_vec({c, s});
}

ShotRun run_shot(const Domain& dom, const MetricField& m, double theta, double budget) {
  ShotRun r;
  Shot& s = r.shot;
  s.theta = theta;
  s.start = dom.boundary_point(direction(theta));
  const Vec inward = -m.raise(s.start, dom.grad_phi(s.start));
  GeodesicOptions o;
  o.t_max = budget;
  o.crossing = [&dom](const Vec& x) { return dom.phi(x); };
  try {
    r.traj = integrate_geodesic(m, s.start, inward / std::sqrt(m.quad(s.start, inward)), o);
  } catch (const Error& e) {
    s.note = e.what();
    return r;
  }
  if (!r.traj.crossed || r.traj.truncated) {
    s.note = r.traj.truncated ? "integration truncated: " + r.traj.note : "no return within the length budget";
    return r;
  }
  s.end = r.traj.end_point();
  s.length = r.traj.t.back();
  if (s.length < 1e-6 * budget) {
    s.note = "degenerate return at the launch point";
    return r;
  }
  const Vec& v = r.traj.end_velocity();
  const Vec g = dom.grad_phi(s.end);
  const Vec tau = make_vec({-g[1], g[0]});
  s.defect = v.dot(m.lower(s.end, tau)) / std::sqrt(m.quad(s.end, v) * m.quad(s.end, tau));
  s.returned = true;
  return r;
}

// Nodes at equal arclength on the unit-speed trajectory, cubic Hermite between samples.
DiscretePath resample_trajectory(const Domain& dom, const GeodesicTrajectory& tr, int n) {
  const double L = tr.t.back();
  std::vector<Vec> nodes(n + 1);
  std::size_t j = 0;
  for (int k = 0; k <= n; ++k) {
    const double s = L * k / n;
    while (j + 2 < tr.t.size() && tr.t[j + 1] < s) ++j;
    const double h = tr.t[j + 1] - tr.t[j];
    const double u = std::clamp((s - tr.t[j]) / h, 0.0, 1.0);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    nodes[k] = h00 * tr.x[j] + h10 * h * tr.v[j] + h01 * tr.x[j + 1] + h11 * h * tr.v[j + 1];
  }
  nodes.front() = tr.x.front();
  nodes.back() = dom.project_to_boundary(tr.x.back());
  return DiscretePath(std::move(nodes));
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (b[k] < a[k]) return false;
  }
  return false;
}

double default_budget(const Domain& dom, const MetricField& m) {
  const int k = 16;
  double longest = 0.0;
  for (int i = 0; i < k / 2; ++i) {
    const double th = 2.0 * std::numbers::pi * i / k;
    const Vec a = dom.boundary_point(direction(th));
    const Vec b = dom.boundary_point(direction(th + std::numbers::pi));
    try {
      longest = std::max(longest, path_length(m, chord_family(dom, a, b, 64)));
    } catch (const Error&) {
      longest = std::max(longest, (a - b).norm() * std::sqrt(m.quad(dom.center(), make_vec({1.0, 0.0}))));
    }
  }
  return 4.0 * longest;
}

}  // namespace

Shot shoot_normal(const Domain& dom, const MetricField& m, double theta, double budget) {
  require(dom.dim() == 2, ErrorCode::Unsupported, "shooting: only dimension 2");
  require(budget > 0.0, ErrorCode::InvalidArgument, "shooting: nonpositive length budget");
  return run_shot(dom, m, theta, budget).shot;
}

ShootingResult shoot_ogc_2d(const Domain& dom, const MetricField& m, int count,
                            const ShootOptions& opt) {
  require(dom.dim() == 2 && m.dim() == 2, ErrorCode::Unsupported, "shooting: only dimension 2");
  require(count >= 2, ErrorCode::InvalidArgument, "shooting: need at least two boundary angles");
  require(opt.tol > 0.0 && opt.zero_tol >= 0.0 && opt.merge_tol >= 0.0, ErrorCode::Config,
          "shooting: tolerances must be positive");
  require(opt.segments >= 2, ErrorCode::Config, "shooting: need at least two segments");
  require(opt.threads >= 1, ErrorCode::Config, "shooting: threads must be >= 1");
  const double budget = opt.length_budget > 0.0 ? opt.length_budget : default_budget(dom, m);

  ShootingResult res;
  res.samples.resize(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++)
      res.samples[k] = run_shot(dom, m, 2.0 * std::numbers::pi * k / count, budget).shot;
  };
  const int nt = std::min(opt.threads, count);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const Shot& s : res.samples)
    if (!s.returned) {
      ++res.skipped;
      std::ostringstream msg;
      msg << "theta " << s.theta << " skipped: " << s.note;
      res.notes.push_back(msg.str());
    }

  auto is_zero = [&](const Shot& s) { return s.returned && std::abs(s.defect) <= opt.zero_tol; };
  res.continuum = res.skipped == 0 &&
                  std::all_of(res.samples.begin(), res.samples.end(), is_zero);
  if (res.continuum) res.notes.push_back("arrival defect vanishes on the whole grid; continuum of chords");

  for (int k = 0; k < count; ++k) {
    const Shot& a = res.samples[k];
    if (is_zero(a)) {
      res.roots.push_back(a.theta);
      continue;
    }
    const Shot& b = res.samples[(k + 1) % count];
    if (!a.returned || !b.returned || is_zero(b) || (a.defect > 0) == (b.defect > 0)) continue;
    double lo = a.theta, hi = k + 1 == count ? 2.0 * std::numbers::pi : b.theta;
    const bool lo_positive = a.defect > 0;
    Shot mid;
    bool lost = false;
    while (hi - lo > opt.tol) {
      mid = run_shot(dom, m, 0.5 * (lo + hi), budget).shot;
      if (!mid.returned) {
        lost = true;
        break;
      }
      if (std::abs(mid.defect) <= opt.zero_tol) break;
      ((mid.defect > 0) == lo_positive ? lo : hi) = mid.theta;
    }
    const double root = mid.returned && std::abs(mid.defect) <= opt.zero_tol ? mid.theta : 0.5 * (lo + hi);
    const Shot fin = run_shot(dom, m, root, budget).shot;
    std::ostringstream msg;
    if (lost || !fin.returned) {
      msg << "sign change near theta " << root << " lost: a shot failed to return";
      res.notes.push_back(msg.str());
    } else if (std::abs(fin.defect) > 1e-6) {
      // The defect jumps here instead of crossing zero.
      msg << "sign change near theta " << root << " is a jump (defect " << fin.defect << ")";
      res.notes.push_back(msg.str());
    } else {
      res.roots.push_back(std::fmod(root, 2.0 * std::numbers::pi));
    }
  }
  std::sort(res.roots.begin(), res.roots.end());

  for (double th : res.roots) {
    const ShotRun r = run_shot(dom, m, th, budget);
    if (!r.shot.returned) continue;
    const bool dup = std::any_of(res.ogcs.begin(), res.ogcs.end(), [&](const CriticalCurve& c) {
      const Vec &p = c.path.front(), &q = c.path.back();
      const double same = std::max((p - r.shot.start).norm(), (q - r.shot.end).norm());
      const double flip = std::max((q - r.shot.start).norm(), (p - r.shot.end).norm());
      return std::min(same, flip) <= opt.merge_tol;
    });
    if (dup) continue;
    CriticalCurve c;
    c.path = resample_trajectory(dom, r.traj, opt.segments);
    c.cls = CurveClass::OGC;
    c.energy = path_energy(m, c.path);
    std::tie(c.orth_defect_start, c.orth_defect_end) = endpoint_defects(dom, m, c.path);
    std::ostringstream note;
    note.precision(12);
    note << "shot from theta " << th;
    c.note = note.str();
    res.ogcs.push_back(reversed_is_canonical(c.path) ? reverse_curve(std::move(c)) : std::move(c));
  }
  std::stable_sort(res.ogcs.begin(), res.ogcs.end(), [](const CriticalCurve& a, const CriticalCurve& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    if (lex_less(a.path.front(), b.path.front())) return true;
    if (lex_less(b.path.front(), a.path.front())) return false;
    return lex_less(a.path.back(), b.path.back());
  });
  return res;
}

OscillatorReference oscillator_reference(const std::vector<double>& lambda, double E, int samples) {
  require(!lambda.empty() && static_cast<int>(lambda.size()) <= kMaxDim, ErrorCode::InvalidArgument,
          "oscillator reference: need 1 to 4 frequencies");
  require(E > 0.0, ErrorCode::InvalidArgument, "oscillator reference: energy must be positive");
  require(samples >= 2, ErrorCode::InvalidArgument, "oscillator reference: need at least two samples");
  for (double l : lambda)
    require(l > 0.0 && std::isfinite(l), ErrorCode::InvalidArgument,
            "oscillator reference: frequencies must be positive");

  OscillatorReference ref;
  const int d = static_cast<int>(lambda.size());
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double r = lambda[i] / lambda[j];
      for (int q = 1; q <= 12; ++q) {
        const double p = std::round(r * q);
        if (p >= 1.0 && std::abs(r - p / q) <= 1e-9 * r) {
          std::ostringstream msg;
          msg << "lambda_" << i << " / lambda_" << j << " is close to " << p << "/" << q
              << "; a resonant well can carry brake orbits off the axes";
          ref.warnings.push_back(msg.str());
          break;
        }
      }
    }

  for (int i = 0; i < d; ++i) {
    const double w = std::sqrt(2.0) * lambda[i];
    const double A = std::sqrt(E) / lambda[i];
    BrakeOrbit o;
    o.half_period = std::numbers::pi / w;
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    for (int k = 0; k <= samples; ++k) {
      const double t = o.half_period * k / samples;
      o.t.push_back(t);
      o.q.push_back(A * std::cos(w * t) * e);
      o.qdot.push_back(-A * w * std::sin(w * t) * e);
    }
    o.brake_start = A * e;
    o.brake_end = -A * e;
    // E - V = E sin^2(w t) along the orbit.
    o.jacobi_length = E * std::numbers::pi / (2.0 * lambda[i]);
    ref.orbits.push_back(std::move(o));
  }
  return ref;
}

namespace {

template <class T, class F>
SetComparison compare_sets(const std::vector<T>& a, const std::vector<T>& b, F dist) {
  SetComparison c;
  c.a_to_b.assign(a.size(), -1);
  c.b_to_a.assign(b.size(), -1);
  c.a_dist.assign(a.size(), std::numeric_limits<double>::infinity());
  c.b_dist.assign(b.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = dist(a[i], b[j]);
      if (d < c.a_dist[i]) {
        c.a_dist[i] = d;
        c.a_to_b[i] = static_cast<int>(j);
      }
      if (d < c.b_dist[j]) {
        c.b_dist[j] = d;
        c.b_to_a[j] = static_cast<int>(i);
      }
    }
  c.distance = 0.0;
  for (double d : c.a_dist) c.distance = std::max(c.distance, d);
  for (double d : c.b_dist) c.distance = std::max(c.distance, d);
  return c;
}

}  // namespace

SetComparison compare_curve_sets(const std::vector<CriticalCurve>& a,
                                 const std::vector<CriticalCurve>& b) {
  return compare_sets(a, b, [](const CriticalCurve& x, const CriticalCurve& y) {
    return hausdorff(x.path, y.path);
  });
}

SetComparison compare_orbit_sets(const std::vector<BrakeOrbit>& a, const std::vector<BrakeOrbit>& b) {
  return compare_sets(a, b, [](const BrakeOrbit& x, const BrakeOrbit& y) { return orbit_sup_distance(x, y); });
}

}  // namespace ogc
