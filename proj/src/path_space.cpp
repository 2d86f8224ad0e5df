#include "ogc/path_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ogc {
namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (int k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

// Segment terms summed in mirrored pairs, so reversal leaves the float result unchanged.
template <class F>
double mirrored_sum(int count, F term) {
  double s = 0.0;
  int i = 0, j = count - 1;
  for (; i < j; ++i, --j) s += term(i) + term(j);
  if (i == j) s += term(i);
  return s;
}

Vec pull_inside(const Domain& dom, const Vec& x) {
  return dom.phi(x) > 0.0 ? dom.project_to_boundary(x) : x;
}

std::vector<Vec> uniform_resample(const std::vector<Vec>& pts, int n) {
  std::vector<double> cum(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  const double total = cum.back();
  std::vector<Vec> out(n + 1);
  out.front() = pts.front();
  out.back() = pts.back();
  size_t seg = 0;
  for (int i = 1; i < n; ++i) {
    const double target = total * i / n;
    while (seg + 2 < pts.size() && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double w = len > 0.0 ? std::clamp((target - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out[i] = (1.0 - w) * pts[seg] + w * pts[seg + 1];
  }
  return out;
}

}  // namespace

void check_admissible(const Domain& dom, const DiscretePath& p, const PathTolerances& tol) {
  require(p.segments() >= 1, ErrorCode::InvalidArgument, "path: needs at least one segment");
  require(std::abs(dom.phi(p.front())) <= tol.boundary &&
              std::abs(dom.phi(p.back())) <= tol.boundary,
          ErrorCode::Precondition, "path: endpoint off the boundary");
  for (const Vec& x : p.nodes)
    require(dom.phi(x) <= tol.boundary, ErrorCode::Precondition, "path: node outside the domain");
}

bool reversed_is_canonical(const DiscretePath& p) {
  const int n = p.segments();
  for (int i = 0, j = n; i < j; ++i, --j) {
    if (lex_less(p.nodes[j], p.nodes[i])) return true;
    if (lex_less(p.nodes[i], p.nodes[j])) return false;
  }
  return false;
}

DiscretePath reverse_path(const DiscretePath& p) {
  DiscretePath r(std::vector<Vec>(p.nodes.rbegin(), p.nodes.rend()));
  r.energy = p.energy;
  return r;
}

DiscretePath chord_family(const Domain& dom, const Vec& A, const Vec& B, int n) {
  require(n >= 2, ErrorCode::InvalidArgument, "chord: need at least two segments");
  require(A.size() == dom.dim() && B.size() == dom.dim(), ErrorCode::InvalidArgument,
          "chord: endpoint dimension mismatch");
  require(std::abs(dom.phi(A)) <= 1e-7 && std::abs(dom.phi(B)) <= 1e-7, ErrorCode::Precondition,
          "chord: endpoints must lie on the boundary");
  if (lex_less(B, A)) return reverse_path(chord_family(dom, B, A, n));

  if (A == B) return DiscretePath(std::vector<Vec>(n + 1, A));
  std::vector<Vec> pts(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    pts[i] = pull_inside(dom, (1.0 - s) * A + s * B);
  }
  pts.front() = A;
  pts.back() = B;
  std::vector<Vec> out = uniform_resample(pts, n);
  for (int i = 1; i < n; ++i) out[i] = pull_inside(dom, out[i]);
  return DiscretePath(std::move(out));
}

DiscretePath resample_path(const Domain& dom, const DiscretePath& p, int n) {
  require(n >= 1 && p.segments() >= 1, ErrorCode::InvalidArgument, "resample: empty path");
  const int m = p.segments();
  std::vector<Vec> out(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) * m / n;
    const int k = std::min(static_cast<int>(std::floor(s)), m - 1);
    const double w = s - k;
    out[i] = (1.0 - w) * p.nodes[k] + w * p.nodes[k + 1];
  }
  out.front() = p.front();
  out.back() = p.back();
  for (int i = 1; i < n; ++i) out[i] = pull_inside(dom, out[i]);
  return DiscretePath(std::move(out));
}

double path_energy(const MetricField& m, const DiscretePath& p) {
  const int n = p.segments();
  require(n >= 1, ErrorCode::InvalidArgument, "energy: empty path");
  const auto& x = p.nodes;
  const double s = mirrored_sum(n, [&](int i) {
    const Vec d = x[i + 1] - x[i];
    const Vec mid = 0.5 * (x[i] + x[i + 1]);
    return m.quad(mid, d);
  });
  const double F = n * s;
  require(std::isfinite(F), ErrorCode::Evaluation, "energy: non-finite value");
  return F;
}

std::vector<Vec> energy_gradient(const MetricField& m, const DiscretePath& p) {
  const int n = p.segments();
  require(n >= 1, ErrorCode::InvalidArgument, "energy gradient: empty path");
  const auto& x = p.nodes;
  std::vector<Vec> grad(n + 1, Vec::Zero(p.dim()));
  std::vector<Vec> lead(n), half(n);
  for (int i = 0; i < n; ++i) {
    const Vec d = x[i + 1] - x[i];
    const Vec mid = 0.5 * (x[i] + x[i + 1]);
    lead[i] = 2.0 * n * m.lower(mid, d);
    half[i] = 0.5 * n * m.quad_gradient(mid, d);
  }
  // Node i sees segments i - 1 and i; adding in fixed (left, right) order keeps the
  // result mirror-exact.
  for (int i = 0; i <= n; ++i) {
    Vec gl = Vec::Zero(p.dim()), gr = Vec::Zero(p.dim());
    if (i > 0) gl = lead[i - 1] + half[i - 1];
    if (i < n) gr = -lead[i] + half[i];
    grad[i] = gl + gr;
  }
  return grad;
}

double partial_energy(const MetricField& m, const DiscretePath& p, int a, int b) {
  const int n = p.segments();
  require(0 <= a && a <= b && b <= n, ErrorCode::InvalidArgument, "partial energy: bad range");
  double s = 0.0;
  for (int i = a; i < b; ++i)
    s += m.quad(0.5 * (p.nodes[i] + p.nodes[i + 1]), p.nodes[i + 1] - p.nodes[i]);
  return n * s;
}

double path_length(const MetricField& m, const DiscretePath& p) {
  const int n = p.segments();
  return mirrored_sum(n, [&](int i) {
    return std::sqrt(m.quad(0.5 * (p.nodes[i] + p.nodes[i + 1]), p.nodes[i + 1] - p.nodes[i]));
  });
}

double dist_star(const DiscretePath& p, const DiscretePath& q) {
  require(p.segments() == q.segments(), ErrorCode::InvalidArgument,
          "dist_star: paths must have the same number of segments");
  const int n = p.segments();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec dp = p.nodes[i + 1] - p.nodes[i];
    const Vec dq = q.nodes[i + 1] - q.nodes[i];
    s += (dp - dq).squaredNorm();
  }
  const double ends =
      std::max((p.front() - q.front()).norm(), (p.back() - q.back()).norm());
  return std::sqrt(n * s) + ends;
}

std::vector<std::pair<int, int>> ContactSet::interior() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& iv : intervals)
    if (iv.first > 0 && iv.second < n) out.push_back(iv);
  return out;
}

bool ContactSet::touches(int i) const {
  for (const auto& [a, b] : intervals)
    if (a <= i && i <= b) return true;
  return false;
}

ContactSet contact_set(const Domain& dom, const DiscretePath& p, double tol) {
  ContactSet c;
  c.n = p.segments();
  int start = -1;
  for (int i = 0; i <= c.n; ++i) {
    const bool on = dom.phi(p.nodes[i]) >= -tol;
    if (on && start < 0) start = i;
    if (!on && start >= 0) {
      c.intervals.emplace_back(start, i - 1);
      start = -1;
    }
  }
  if (start >= 0) c.intervals.emplace_back(start, c.n);
  return c;
}

double strip_min(const Domain& dom, const DiscretePath& p, int a, int b) {
  require(0 <= a && a <= b && b <= p.segments(), ErrorCode::InvalidArgument,
          "strip_min: empty or out-of-range index range");
  double f = std::numeric_limits<double>::infinity();
  for (int i = a; i <= b; ++i) f = std::min(f, dom.phi(p.nodes[i]));
  return f;
}

std::vector<double> phi_profile(const Domain& dom, const DiscretePath& p) {
  std::vector<double> out;
  out.reserve(p.nodes.size());
  for (const Vec& x : p.nodes) out.push_back(dom.phi(x));
  return out;
}

double hausdorff(const DiscretePath& p, const DiscretePath& q) {
  // Nodes of one path against the segments of the other, both ways.
  auto directed = [](const DiscretePath& a, const DiscretePath& b) {
    double worst = 0.0;
    for (const Vec& x : a.nodes) {
      double best = std::numeric_limits<double>::infinity();
      if (b.nodes.size() == 1) best = (x - b.front()).squaredNorm();
      for (size_t k = 0; k + 1 < b.nodes.size(); ++k) {
        const Vec d = b.nodes[k + 1] - b.nodes[k];
        const double dd = d.squaredNorm();
        const double w = dd > 0.0 ? std::clamp((x - b.nodes[k]).dot(d) / dd, 0.0, 1.0) : 0.0;
        best = std::min(best, (x - b.nodes[k] - w * d).squaredNorm());
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(p, q), directed(q, p));
}

}  // namespace ogc
