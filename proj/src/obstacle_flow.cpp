#include "ogc/obstacle_flow.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ogc {

const char* to_string(CurveClass c) {
  switch (c) {
    case CurveClass::Trivial: return "trivial";
    case CurveClass::OGC: return "ogc";
    case CurveClass::WeakOGC: return "weak_ogc";
    case CurveClass::ObstacleGeodesic: return "obstacle_geodesic";
    case CurveClass::Unconverged: return "unconverged";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  require(initial_step > 0.0 && backtrack > 0.0 && backtrack < 1.0 && max_backtracks >= 1,
          ErrorCode::Config, "flow: step policy needs initial > 0 and backtrack in (0, 1)");
  require(armijo > 0.0 && armijo < 0.5, ErrorCode::Config, "flow: armijo constant out of range");
  require(max_iterations >= 0, ErrorCode::Config, "flow: negative iteration budget");
  require(stall >= 0.0 && boundary_tol > 0.0 && contact_tol > 0.0 && orth_tol > 0.0 &&
              residual_tol > 0.0 && multiplier_tol > 0.0 && tangential_tol > 0.0,
          ErrorCode::Config, "flow: tolerances must be positive");
  require(delta1 >= 0.0 && Delta_star >= 0.0 && escape_amplitude >= 0.0 && gamma_band >= 0.0,
          ErrorCode::Config, "flow: negative strip parameter");
  require(escape_rungs >= 1, ErrorCode::Config, "flow: escape ladder needs a rung");
  require(M0_sq > 0.0, ErrorCode::Config, "flow: M0^2 must be positive");
  require(coarse_segments >= 0, ErrorCode::Config, "flow: negative coarse resolution");
}

FlowLimits resolve_limits(const Domain& dom, const FlowConfig& cfg, int n) {
  const DomainConstants& c = dom.constants();
  FlowLimits l;
  l.delta1 = cfg.delta1 > 0.0 ? cfg.delta1 : c.delta1;
  require(l.delta1 > 0.0, ErrorCode::Precondition,
          "flow: delta1 unset (prepare the domain or give it in the config)");
  const double K0 = std::max(c.K0, 1e-12);
  l.trivial_energy = cfg.trivial_energy >= 0.0 ? cfg.trivial_energy : l.delta1 * l.delta1 / (K0 * K0);
  if (cfg.Delta_star > 0.0) {
    l.Delta_star = cfg.Delta_star;
  } else {
    const double bound = std::isfinite(cfg.M0_sq)
                             ? c.delta0 * c.delta0 / (K0 * K0 * cfg.M0_sq)
                             : 0.0;
    l.Delta_star = std::max(bound, 1.0 / std::max(n, 1));
  }
  l.escape_amplitude = cfg.escape_amplitude > 0.0 ? cfg.escape_amplitude : l.delta1 / 4.0;
  l.gamma_band = cfg.gamma_band > 0.0 ? cfg.gamma_band : l.delta1 / 20.0;
  return l;
}

namespace {

Mat tangent_basis(const Vec& n) {
  const int d = static_cast<int>(n.size());
  Eigen::HouseholderQR<Mat> qr(n);
  Mat q = qr.householderQ();
  return q.rightCols(d - 1);
}

enum class NodeKind { Free, Tangent, Pinned };

struct Kkt {
  std::vector<Vec> d;
  double pg = 0.0;
  double gd = 0.0;
  int active = 0;
};

// Preconditioned descent direction: minimizes G.d + d^T A d / 2 over node moves that keep
// endpoints tangent to the boundary and contact nodes from moving outward, with
// A = 2 (n K_g + M_g / n) the weighted path Laplacian plus a lumped mass term.
Kkt solve_kkt(const DiscretePath& p, const MetricField& m, const std::vector<Vec>& G,
              const std::vector<PhiJet>& jets, const FlowConfig& cfg) {
  const int n = p.segments();
  const int dim = p.dim();
  const auto& x = p.nodes;

  std::vector<Mat> W(n);
  for (int i = 0; i < n; ++i) W[i] = m.g(0.5 * (x[i] + x[i + 1]));
  std::vector<Mat> D(n + 1, Mat::Zero(dim, dim));
  for (int i = 0; i < n; ++i) {
    const Mat blk = 2.0 * n * W[i] + W[i] / n;
    D[i] += blk;
    D[i + 1] += blk;
  }

  std::vector<Vec> normal(n + 1);
  std::vector<NodeKind> kind(n + 1, NodeKind::Free);
  std::vector<bool> candidate(n + 1, false);
  for (int i = 0; i <= n; ++i) {
    const double gn = jets[i].grad.norm();
    normal[i] = gn > 0.0 ? Vec(jets[i].grad / gn) : Vec(Vec::Zero(dim));
    if (i == 0 || i == n) {
      kind[i] = cfg.pinned_endpoints || gn == 0.0 ? NodeKind::Pinned : NodeKind::Tangent;
    } else if (jets[i].value >= -cfg.contact_tol && gn > 0.0) {
      candidate[i] = true;
      kind[i] = NodeKind::Tangent;
    }
  }

  Kkt out;
  std::vector<std::vector<NodeKind>> seen;
  for (int round = 0; round < 30; ++round) {
    std::vector<Mat> B(n + 1);
    std::vector<int> off(n + 2, 0);
    for (int i = 0; i <= n; ++i) {
      switch (kind[i]) {
        case NodeKind::Free: B[i] = Mat::Identity(dim, dim); break;
        case NodeKind::Tangent: B[i] = tangent_basis(normal[i]); break;
        case NodeKind::Pinned: B[i] = Mat::Zero(dim, 0); break;
      }
      off[i + 1] = off[i] + static_cast<int>(B[i].cols());
    }
    const int N = off[n + 1];
    out.d.assign(n + 1, Vec::Zero(dim));
    if (N > 0) {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(static_cast<size_t>(3 * N * dim));
      Eigen::VectorXd rhs(N);
      for (int i = 0; i <= n; ++i) {
        const int ki = static_cast<int>(B[i].cols());
        if (ki == 0) continue;
        const Mat Dii = B[i].transpose() * D[i] * B[i];
        for (int a = 0; a < ki; ++a)
          for (int b = 0; b < ki; ++b) trip.emplace_back(off[i] + a, off[i] + b, Dii(a, b));
        rhs.segment(off[i], ki) = -B[i].transpose() * G[i];
        if (i < n && B[i + 1].cols() > 0) {
          const Mat O = B[i].transpose() * (-2.0 * n * W[i]) * B[i + 1];
          for (int a = 0; a < O.rows(); ++a)
            for (int b = 0; b < O.cols(); ++b) {
              trip.emplace_back(off[i] + a, off[i + 1] + b, O(a, b));
              trip.emplace_back(off[i + 1] + b, off[i] + a, O(a, b));
            }
        }
      }
      Eigen::SparseMatrix<double> R(N, N);
      R.setFromTriplets(trip.begin(), trip.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(R);
      require(ldlt.info() == Eigen::Success, ErrorCode::Evaluation,
              "flow: descent system is not positive definite");
      const Eigen::VectorXd y = ldlt.solve(rhs);
      for (int i = 0; i <= n; ++i)
        if (B[i].cols() > 0) out.d[i] = B[i] * y.segment(off[i], B[i].cols());
    }

    // Multipliers of the active contact constraints; release those pulling inward and
    // activate free contact nodes that would move outward.
    bool changed = false;
    for (int i = 1; i < n; ++i) {
      if (!candidate[i]) continue;
      if (kind[i] == NodeKind::Tangent) {
        Vec Ad = D[i] * out.d[i];
        Ad += -2.0 * n * W[i - 1] * out.d[i - 1];
        Ad += -2.0 * n * W[i] * out.d[i + 1];
        const double mu = -normal[i].dot(Ad + G[i]);
        if (mu < -1e-14 * std::max(1.0, G[i].norm())) {
          kind[i] = NodeKind::Free;
          changed = true;
        }
      } else if (normal[i].dot(out.d[i]) > 0.0) {
        kind[i] = NodeKind::Tangent;
        changed = true;
      }
    }
    if (!changed) break;
    if (std::find(seen.begin(), seen.end(), kind) != seen.end()) break;
    seen.push_back(kind);
  }

  double pg2 = 0.0, gd = 0.0;
  int active = 0;
  for (int i = 0; i <= n; ++i) {
    Vec gi = G[i];
    if (kind[i] == NodeKind::Tangent) gi -= normal[i].dot(gi) * normal[i];
    if (kind[i] == NodeKind::Pinned) gi.setZero();
    pg2 += gi.squaredNorm();
    gd += G[i].dot(out.d[i]);
    if (i > 0 && i < n && kind[i] == NodeKind::Tangent) ++active;
  }
  out.pg = std::sqrt(pg2);
  out.gd = gd;
  out.active = active;
  return out;
}

std::vector<PhiJet> node_jets(const Domain& dom, const DiscretePath& p) {
  std::vector<PhiJet> j;
  j.reserve(p.nodes.size());
  for (const Vec& x : p.nodes) j.push_back(dom.jet(x, false));
  return j;
}

DiscretePath admissible_trial(const Domain& dom, const DiscretePath& p, const std::vector<Vec>& d,
                              double alpha, const FlowConfig& cfg) {
  const int n = p.segments();
  DiscretePath t = p;
  t.energy.reset();
  for (int i = 0; i <= n; ++i) {
    if ((i == 0 || i == n) && cfg.pinned_endpoints) continue;
    Vec y = p.nodes[i] + alpha * d[i];
    if (i == 0 || i == n) {
      y = dom.project_to_boundary(y, 0.1 * cfg.boundary_tol);
    } else if (dom.phi(y) > 0.0) {
      y = dom.project_to_boundary(y, 0.1 * cfg.boundary_tol);
    }
    t.nodes[i] = y;
  }
  return t;
}

StepResult step_impl(const Domain& dom, const MetricField& m, const DiscretePath& p,
                     const FlowConfig& cfg) {
  StepResult r;
  r.path = p;
  const double F0 = p.energy ? *p.energy : path_energy(m, p);
  r.path.energy = F0;
  r.energy = F0;
  const auto G = energy_gradient(m, p);
  const auto jets = node_jets(dom, p);
  const Kkt k = solve_kkt(p, m, G, jets, cfg);
  r.pg_norm = k.pg;
  r.active = k.active;
  if (k.pg <= cfg.stall_for(p.segments()) || k.gd >= 0.0) {
    r.accepted = true;
    r.stalled = true;
    return r;
  }
  // Below this predicted decrease the energy cannot resolve the step.
  const double resolution = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(F0);
  double alpha = cfg.initial_step;
  for (int bt = 0; bt < cfg.max_backtracks; ++bt, alpha *= cfg.backtrack) {
    DiscretePath t;
    try {
      t = admissible_trial(dom, p, k.d, alpha, cfg);
    } catch (const Error&) {
      continue;
    }
    const double F = path_energy(m, t);
    if (-alpha * k.gd <= resolution && F > F0) break;
    if (F <= F0 + cfg.armijo * alpha * k.gd && F <= F0) {
      double disp = 0.0;
      for (int i = 0; i <= p.segments(); ++i)
        disp = std::max(disp, (t.nodes[i] - p.nodes[i]).norm());
      t.energy = F;
      r.path = std::move(t);
      r.energy = F;
      r.alpha = alpha;
      r.displacement = disp;
      r.accepted = true;
      return r;
    }
  }
  r.stalled = true;
  r.line_search_failed = -alpha * k.gd > resolution;
  return r;
}

double gate_for(const FlowConfig& cfg, int n, double F) {
  return std::max(100.0 * cfg.stall_for(n), 1e-4 * std::max(1.0, F));
}

MultiplierProfile profile_impl(const Domain& dom, const MetricField& m, const DiscretePath& p,
                               const FlowConfig& cfg) {
  const int n = p.segments();
  require(n >= 2, ErrorCode::InvalidArgument, "multipliers: need at least two segments");
  const auto& x = p.nodes;
  const double F = std::max(path_energy(m, p), 1e-300);
  MultiplierProfile prof;
  prof.geodesic.assign(n + 1, 0.0);
  prof.max_tangential = 0.0;
  // Discrete Euler-Lagrange acceleration of the midpoint energy: a weighted second
  // difference plus the metric-derivative terms, n^2 (x_{i+1} - 2 x_i + x_{i-1}) when flat.
  const std::vector<Vec> G = energy_gradient(m, p);
  for (int i = 1; i < n; ++i) {
    const Vec v = 0.5 * n * (x[i + 1] - x[i - 1]);
    const Vec r = -0.5 * n * m.raise(x[i], G[i]);
    const double phi = dom.phi(x[i]);
    if (phi < -cfg.contact_tol) {
      prof.geodesic[i] = std::sqrt(std::max(0.0, m.quad(x[i], r))) / F;
      prof.max_geodesic = std::max(prof.max_geodesic, prof.geodesic[i]);
      continue;
    }
    const PhiJet j = dom.jet(x[i], true);
    const double dn2 = m.covector_norm_sq(x[i], j.grad);
    const double lambda = j.grad.dot(r) / dn2;
    const Vec up = m.raise(x[i], j.grad);
    const double tang = std::sqrt(std::max(0.0, m.quad(x[i], r - lambda * up))) / F;
    Mat h = j.hess;
    if (m.kind() != MetricKind::Euclidean) {
      const Christoffel ch = m.christoffel(x[i]);
      for (int k = 0; k < m.dim(); ++k) h -= j.grad[k] * ch.gamma[k];
    }
    prof.contact.push_back(i);
    prof.lambda.push_back(lambda);
    prof.expected.push_back(-v.dot(h * v) / dn2);
    prof.tangential.push_back(tang);
    prof.max_tangential = std::max(prof.max_tangential, tang);
    prof.min_lambda = std::min(prof.min_lambda, lambda);
  }
  return prof;
}

double endpoint_defect(const Domain& dom, const MetricField& m, const Vec& x, const Vec& v) {
  const Vec w = dom.grad_phi(x);
  const double vv = m.quad(x, v);
  const double ww = m.covector_norm_sq(x, w);
  if (vv <= 0.0 || ww <= 0.0) return 1.0;
  const double c = w.dot(v) / std::sqrt(vv * ww);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

std::pair<double, double> defects_impl(const Domain& dom, const MetricField& m,
                                       const DiscretePath& p) {
  const int n = p.segments();
  const auto& x = p.nodes;
  if (n < 2) {
    return {endpoint_defect(dom, m, x[0], x[1] - x[0]), endpoint_defect(dom, m, x[n], x[n] - x[n - 1])};
  }
  const Vec v0 = 0.5 * n * (-3.0 * x[0] + 4.0 * x[1] - x[2]);
  const Vec vn = 0.5 * n * (3.0 * x[n] - 4.0 * x[n - 1] + x[n - 2]);
  return {endpoint_defect(dom, m, x[0], v0), endpoint_defect(dom, m, x[n], vn)};
}

CriticalCurve classify_impl(const Domain& dom, const MetricField& m, const DiscretePath& p,
                            const FlowConfig& cfg) {
  const int n = p.segments();
  const FlowLimits lim = resolve_limits(dom, cfg, n);
  CriticalCurve c;
  c.path = p;
  c.energy = path_energy(m, p);
  c.path.energy = c.energy;
  if (c.energy <= lim.trivial_energy) {
    c.cls = CurveClass::Trivial;
    return c;
  }
  c.stationarity = stationarity(dom, m, p, cfg);
  c.multipliers = profile_impl(dom, m, p, cfg);
  std::tie(c.orth_defect_start, c.orth_defect_end) = defects_impl(dom, m, p);
  const auto& ct = c.multipliers.contact;
  for (size_t k = 0; k < ct.size(); ++k) {
    if (k > 0 && ct[k] == ct[k - 1] + 1)
      c.interior_contact.back().second = ct[k];
    else
      c.interior_contact.emplace_back(ct[k], ct[k]);
  }
  if (c.stationarity > gate_for(cfg, n, c.energy)) {
    c.cls = CurveClass::Unconverged;
    c.note = "not a stalled flow point";
    return c;
  }
  const bool orth = c.orth_defect_start <= cfg.orth_tol && c.orth_defect_end <= cfg.orth_tol;
  const bool geodesic = c.multipliers.max_geodesic <= cfg.residual_tol;
  if (c.interior_contact.empty()) {
    const double sep = (p.front() - p.back()).norm();
    if (!orth) {
      c.cls = CurveClass::Unconverged;
      c.note = "endpoint not orthogonal";
    } else if (!geodesic) {
      c.cls = CurveClass::Unconverged;
      c.note = "interior geodesic residual too large";
    } else if (sep <= 1e-8 * (1.0 + p.front().norm())) {
      c.cls = CurveClass::Unconverged;
      c.note = "closed curve with coincident endpoints";
    } else {
      c.cls = CurveClass::OGC;
    }
    return c;
  }
  bool isolated = true;
  for (const auto& [a, b] : c.interior_contact) isolated = isolated && b - a <= 1;
  const bool signs = c.multipliers.min_lambda >= -cfg.multiplier_tol;
  const bool tangential = c.multipliers.max_tangential <= cfg.tangential_tol;
  if (!signs || !geodesic) {
    c.cls = CurveClass::Unconverged;
    c.note = !signs ? "negative contact multiplier" : "interior geodesic residual too large";
  } else if (isolated && orth) {
    c.cls = CurveClass::WeakOGC;
  } else if (tangential) {
    c.cls = CurveClass::ObstacleGeodesic;
  } else {
    c.cls = CurveClass::Unconverged;
    c.note = "tangential contact residual too large";
  }
  return c;
}

// Weight of the escape field: sin^2 bump on (-delta1, -delta1/3), peak at -2 delta1/3.
double escape_weight(double phi, double delta1) {
  if (phi <= -delta1 || phi >= -delta1 / 3.0) return 0.0;
  const double s = std::sin(std::numbers::pi * (phi + delta1) / (2.0 * delta1 / 3.0));
  return s * s;
}

std::vector<std::pair<int, int>> escape_intervals_impl(const std::vector<double>& phi,
                                                       double delta1) {
  const int n = static_cast<int>(phi.size()) - 1;
  std::vector<std::pair<int, int>> out;
  const double top = -delta1 / 3.0;
  int i = 1;
  while (i < n) {
    if (phi[i] > top) {
      ++i;
      continue;
    }
    int j = i;
    bool reaches = false;
    while (j < n && phi[j] <= top) {
      reaches = reaches || (phi[j] > -delta1);
      ++j;
    }
    const int a = i - 1, b = j;
    if (a > 0 && b < n && reaches) out.emplace_back(a, b);
    i = j;
  }
  return out;
}

EscapeResult escape_impl(const Domain& dom, const MetricField& m, const DiscretePath& p,
                         const FlowConfig& cfg) {
  const int n = p.segments();
  const FlowLimits lim = resolve_limits(dom, cfg, n);
  const auto phi = phi_profile(dom, p);
  const auto intervals = escape_intervals_impl(phi, lim.delta1);
  require(!intervals.empty(), ErrorCode::Precondition,
          "escape: no node interval reaches the strip -delta1 < phi < -delta1/3");
  const double F0 = p.energy ? *p.energy : path_energy(m, p);
  std::vector<Vec> W(n + 1, Vec::Zero(p.dim()));
  for (const auto& [a, b] : intervals)
    for (int i = a + 1; i < b; ++i) {
      const double w = escape_weight(phi[i], lim.delta1);
      if (w > 0.0) W[i] = w * dom.grad_phi(p.nodes[i]).normalized();
    }
  EscapeResult r;
  r.interval = intervals.front();
  r.path = p;
  r.energy = F0;
  double amp = lim.escape_amplitude;
  for (int k = 0; k < cfg.escape_rungs; ++k, amp *= 0.5) {
    DiscretePath t = p;
    for (int i = 1; i < n; ++i) {
      if (W[i].squaredNorm() == 0.0) continue;
      Vec y = p.nodes[i] + amp * W[i];
      if (dom.phi(y) > 0.0) y = dom.project_to_boundary(y, 0.1 * cfg.boundary_tol);
      t.nodes[i] = y;
    }
    const double F = path_energy(m, t);
    if (F < F0 - 1e-12 * std::max(1.0, F0)) {
      t.energy = F;
      r.descended = true;
      r.path = std::move(t);
      r.energy = F;
      r.amplitude = amp;
      return r;
    }
  }
  return r;
}

TrapStatus trap_impl(const Domain& dom, const MetricField& m, const DiscretePath& p,
                     const std::vector<double>& phi, const FlowConfig& cfg, double F) {
  const int n = p.segments();
  const FlowLimits lim = resolve_limits(dom, cfg, n);
  const DomainConstants& c = dom.constants();
  (void)m;
  TrapStatus s;
  if (c.rho0 > 0.0 && c.x0.size() == p.dim())
    for (const Vec& x : p.nodes) s.avoids_ball = s.avoids_ball && (x - c.x0).norm() > c.rho0;
  const double d1 = lim.delta1;
  bool all_at_band = true;
  int i = 1;
  while (i < n) {
    if (phi[i] < -d1 / 2.0) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && phi[j] >= -d1 / 2.0) ++j;
    // Run i..j-1 has phi >= -delta1/2; widest admissible interval inside it.
    int a = -1, b = -1;
    for (int k = i; k < j; ++k)
      if (phi[k] >= -d1 / 4.0) {
        if (a < 0) a = k;
        b = k;
      }
    if (a >= 0 && static_cast<double>(b - a) / n >= lim.Delta_star) {
      ++s.intervals;
      double f = phi[a];
      for (int k = a; k <= b; ++k) f = std::min(f, phi[k]);
      all_at_band = all_at_band && std::abs(f + d1 / 2.0) <= lim.gamma_band;
    }
    i = j;
  }
  s.in_lambda = F <= cfg.M0_sq && s.avoids_ball && s.intervals > 0;
  s.in_gamma = s.in_lambda && all_at_band;
  return s;
}

double interior_min(const std::vector<double>& phi) {
  double f = 0.0;
  for (size_t i = 1; i + 1 < phi.size(); ++i) f = std::min(f, phi[i]);
  return f;
}

FlowResult flow_impl(const Domain& dom, const MetricField& m, const DiscretePath& p0,
                     const FlowConfig& cfg) {
  const int n = p0.segments();
  const FlowLimits lim = resolve_limits(dom, cfg, n);
  FlowResult res;
  DiscretePath p = p0;
  if (cfg.coarse_segments > 0 && cfg.coarse_segments < n) {
    FlowConfig cc = cfg;
    cc.coarse_segments = 0;
    const FlowResult coarse =
        flow_impl(dom, m, resample_path(dom, p0, cfg.coarse_segments), cc);
    res.iterations += coarse.iterations;
    res.escapes += coarse.escapes;
    p = resample_path(dom, coarse.curve.path, n);
  }
  double F = path_energy(m, p);
  p.energy = F;

  auto record = [&](int it, const std::string& state) {
    const auto phi = phi_profile(dom, p);
    const TrapStatus ts = trap_impl(dom, m, p, phi, cfg, F);
    res.trace.push_back({it, F, state, interior_min(phi), ts.in_lambda, ts.in_gamma});
    if (ts.in_gamma && !res.entered_gamma) {
      res.entered_gamma = true;
      res.first_gamma_iteration = it;
    }
  };
  record(0, "start");

  int it = 0;
  while (true) {
    if (F <= lim.trivial_energy) {
      record(it, "trivial");
      break;
    }
    if (it >= cfg.max_iterations) {
      res.budget_exhausted = true;
      record(it, "budget");
      break;
    }
    ++it;
    StepResult s = step_impl(dom, m, p, cfg);
    if (!s.stalled) {
      p = std::move(s.path);
      F = s.energy;
      record(it, "descent");
      continue;
    }
    const auto phi = phi_profile(dom, p);
    if (!escape_intervals_impl(phi, lim.delta1).empty()) {
      EscapeResult e = escape_impl(dom, m, p, cfg);
      if (e.descended) {
        p = std::move(e.path);
        F = e.energy;
        ++res.escapes;
        record(it, "escape");
        continue;
      }
    }
    record(it, "stall");
    break;
  }
  res.iterations += it;
  res.curve = classify_impl(dom, m, p, cfg);
  if (res.budget_exhausted && res.curve.cls != CurveClass::Trivial) {
    res.curve.cls = CurveClass::Unconverged;
    res.curve.note = "iteration budget exhausted";
  }
  return res;
}

}  // namespace

namespace {

MultiplierProfile reverse_profile(MultiplierProfile prof, int n) {
  for (int& i : prof.contact) i = n - i;
  std::reverse(prof.contact.begin(), prof.contact.end());
  std::reverse(prof.lambda.begin(), prof.lambda.end());
  std::reverse(prof.expected.begin(), prof.expected.end());
  std::reverse(prof.tangential.begin(), prof.tangential.end());
  std::reverse(prof.geodesic.begin(), prof.geodesic.end());
  return prof;
}

}  // namespace

CriticalCurve reverse_curve(CriticalCurve c) {
  const int n = c.path.segments();
  c.path = reverse_path(c.path);
  c.multipliers = reverse_profile(std::move(c.multipliers), n);
  std::swap(c.orth_defect_start, c.orth_defect_end);
  for (auto& iv : c.interior_contact) iv = {n - iv.second, n - iv.first};
  std::reverse(c.interior_contact.begin(), c.interior_contact.end());
  return c;
}


StepResult v_minus_step(const Domain& dom, const MetricField& m, const DiscretePath& p,
                        const FlowConfig& cfg) {
  cfg.validate();
  require(p.segments() >= 1, ErrorCode::InvalidArgument, "flow: empty path");
  if (reversed_is_canonical(p)) {
    StepResult r = step_impl(dom, m, reverse_path(p), cfg);
    r.path = reverse_path(r.path);
    return r;
  }
  return step_impl(dom, m, p, cfg);
}

double stationarity(const Domain& dom, const MetricField& m, const DiscretePath& p,
                    const FlowConfig& cfg) {
  const DiscretePath q = reversed_is_canonical(p) ? reverse_path(p) : p;
  return solve_kkt(q, m, energy_gradient(m, q), node_jets(dom, q), cfg).pg;
}

MultiplierProfile multiplier_profile(const Domain& dom, const MetricField& m,
                                     const DiscretePath& p, const FlowConfig& cfg) {
  const int n = p.segments();
  const double F = path_energy(m, p);
  require(stationarity(dom, m, p, cfg) <= gate_for(cfg, n, F), ErrorCode::Precondition,
          "multipliers: path is not a stalled flow point");
  if (reversed_is_canonical(p))
    return reverse_profile(profile_impl(dom, m, reverse_path(p), cfg), n);
  return profile_impl(dom, m, p, cfg);
}

std::pair<double, double> endpoint_defects(const Domain& dom, const MetricField& m,
                                           const DiscretePath& p) {
  return defects_impl(dom, m, p);
}

CriticalCurve classify(const Domain& dom, const MetricField& m, const DiscretePath& p,
                       const FlowConfig& cfg) {
  cfg.validate();
  if (reversed_is_canonical(p)) return reverse_curve(classify_impl(dom, m, reverse_path(p), cfg));
  return classify_impl(dom, m, p, cfg);
}

std::vector<std::pair<int, int>> escape_intervals(const Domain& dom, const DiscretePath& p,
                                                  double delta1) {
  return escape_intervals_impl(phi_profile(dom, p), delta1);
}

EscapeResult v_plus_escape(const Domain& dom, const MetricField& m, const DiscretePath& p,
                           const FlowConfig& cfg) {
  cfg.validate();
  if (reversed_is_canonical(p)) {
    const int n = p.segments();
    EscapeResult r = escape_impl(dom, m, reverse_path(p), cfg);
    r.path = reverse_path(r.path);
    r.interval = {n - r.interval.second, n - r.interval.first};
    return r;
  }
  return escape_impl(dom, m, p, cfg);
}

TrapStatus trap_status(const Domain& dom, const MetricField& m, const DiscretePath& p,
                       const FlowConfig& cfg) {
  return trap_impl(dom, m, p, phi_profile(dom, p), cfg, path_energy(m, p));
}

FlowResult eta_flow(const Domain& dom, const MetricField& m, const DiscretePath& p0,
                    const FlowConfig& cfg) {
  cfg.validate();
  require(p0.segments() >= 2, ErrorCode::InvalidArgument, "flow: need at least two segments");
  const double F0 = path_energy(m, p0);
  require(F0 <= cfg.M0_sq, ErrorCode::Precondition, "flow: initial energy exceeds M0^2");
  if (reversed_is_canonical(p0)) {
    FlowResult r = flow_impl(dom, m, reverse_path(p0), cfg);
    r.curve = reverse_curve(std::move(r.curve));
    return r;
  }
  return flow_impl(dom, m, p0, cfg);
}

}  // namespace ogc
