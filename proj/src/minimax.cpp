#include "ogc/minimax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace ogc {

std::vector<Vec> boundary_grid(const Domain& dom, int count) {
  require(count >= 1, ErrorCode::InvalidArgument, "boundary grid: empty grid");
  const int d = dom.dim();
  std::vector<Vec> dirs;
  if (d == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      double c = std::cos(a), s = std::sin(a);
      // sin(pi) != 0 in floating point; exact axis seeds keep reflection symmetry.
      if (std::abs(c) < 1e-12) c = 0.0;
      if (std::abs(s) < 1e-12) s = 0.0;
      dirs.push_back(make_vec({c, s}));
    }
  } else {
    for (int i = 0; i < d && static_cast<int>(dirs.size()) < count; ++i)
      for (double sg : {1.0, -1.0}) {
        if (static_cast<int>(dirs.size()) == count) break;
        Vec e = Vec::Zero(d);
        e[i] = sg;
        dirs.push_back(e);
      }
    const int rest = count - static_cast<int>(dirs.size());
    if (rest > 0)
      for (const Vec& u : sphere_directions(d, rest)) dirs.push_back(u);
  }
  std::vector<Vec> pts;
  pts.reserve(dirs.size());
  for (const Vec& u : dirs) pts.push_back(dom.boundary_point(u));
  return pts;
}

SweepGrid chord_grid(const Domain& dom, int count) {
  SweepGrid g;
  g.points = boundary_grid(dom, count);
  for (int i = 0; i < count; ++i)
    for (int j = i; j < count; ++j) g.pairs.emplace_back(i, j);
  return g;
}

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (b[k] < a[k]) return false;
  }
  return false;
}

CriticalCurve canonical(CriticalCurve c) {
  return reversed_is_canonical(c.path) ? reverse_curve(std::move(c)) : c;
}

bool curve_order(const CriticalCurve& a, const CriticalCurve& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  if (lex_less(a.path.front(), b.path.front())) return true;
  if (lex_less(b.path.front(), a.path.front())) return false;
  return lex_less(a.path.back(), b.path.back());
}

}  // namespace

std::vector<CriticalCurve> dedup_geometric(const std::vector<CriticalCurve>& curves, double tol) {
  require(tol >= 0.0, ErrorCode::InvalidArgument, "dedup: negative tolerance");
  std::vector<CriticalCurve> sorted;
  sorted.reserve(curves.size());
  for (const auto& c : curves) sorted.push_back(canonical(c));
  std::stable_sort(sorted.begin(), sorted.end(), curve_order);
  std::vector<CriticalCurve> reps;
  for (auto& c : sorted) {
    // Set distance; the same under either orientation of either curve.
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](const CriticalCurve& r) {
      return hausdorff(r.path, c.path) <= tol;
    });
    if (!seen) reps.push_back(std::move(c));
  }
  return reps;
}

double domain_diameter(const Domain& dom, int dirs) {
  std::vector<Vec> pts;
  for (const Vec& u : sphere_directions(dom.dim(), dirs)) pts.push_back(dom.boundary_point(u));
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

MinimaxReport family_sweep(const Domain& dom, const MetricField& m, const SweepGrid& grid,
                           const SweepConfig& cfg) {
  require(!grid.pairs.empty() && !grid.points.empty(), ErrorCode::InvalidArgument,
          "family sweep: empty grid");
  require(cfg.segments >= 2, ErrorCode::Config, "family sweep: need at least two segments");
  require(cfg.threads >= 1, ErrorCode::Config, "family sweep: threads must be >= 1");
  require(cfg.dedup_tol >= 0.0, ErrorCode::Config, "family sweep: negative dedup tolerance");
  cfg.flow.validate();
  const int np = static_cast<int>(grid.points.size());
  for (const auto& [i, j] : grid.pairs)
    require(i >= 0 && j >= 0 && i < np && j < np, ErrorCode::InvalidArgument,
            "family sweep: pair index out of range");

  const std::size_t count = grid.pairs.size();
  std::vector<DiscretePath> seeds(count);
  MinimaxReport rep;
  for (std::size_t k = 0; k < count; ++k) {
    const auto [i, j] = grid.pairs[k];
    seeds[k] = chord_family(dom, grid.points[i], grid.points[j], cfg.segments);
    rep.M0_sq = std::max(rep.M0_sq, path_energy(m, seeds[k]));
  }
  FlowConfig fc = cfg.flow;
  if (!std::isfinite(fc.M0_sq)) fc.M0_sq = rep.M0_sq * (1.0 + 1e-12) + 1e-300;

  std::vector<FlowResult> results(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        results[k] = eta_flow(dom, m, seeds[k], fc);
      } catch (const Error& e) {
        errors[k] = e.what();
        results[k].curve.path = seeds[k];
        results[k].curve.energy = path_energy(m, seeds[k]);
        results[k].curve.note = e.what();
      }
    }
  };
  const int nt = std::min<int>(cfg.threads, static_cast<int>(count));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const FlowLimits lim = resolve_limits(dom, fc, cfg.segments);
  rep.target = dom.dim();
  rep.lower_bound = lim.trivial_energy;
  rep.dedup_tol = cfg.dedup_tol > 0.0 ? cfg.dedup_tol : 0.02 * domain_diameter(dom);

  std::vector<CriticalCurve> ogcs;
  std::vector<std::size_t> ogc_member;
  rep.members.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const FlowResult& r = results[k];
    MemberOutcome& mo = rep.members[k];
    mo.i = grid.pairs[k].first;
    mo.j = grid.pairs[k].second;
    mo.cls = r.curve.cls;
    mo.initial_energy = path_energy(m, seeds[k]);
    mo.energy = r.curve.energy;
    mo.iterations = r.iterations;
    mo.escapes = r.escapes;
    if (cfg.keep_traces) mo.trace = r.trace;
    ++rep.histogram[static_cast<int>(r.curve.cls)];
    if (!errors[k].empty()) {
      rep.notes.push_back("member (" + std::to_string(mo.i) + "," + std::to_string(mo.j) +
                          ") failed: " + errors[k]);
    }
    if (r.curve.cls == CurveClass::OGC) {
      ogcs.push_back(r.curve);
      ogc_member.push_back(k);
    }
  }

  rep.distinct = dedup_geometric(ogcs, rep.dedup_tol);
  for (std::size_t a = 0; a < ogcs.size(); ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < rep.distinct.size(); ++c) {
      const double h = hausdorff(rep.distinct[c].path, ogcs[a].path);
      if (h < best) {
        best = h;
        rep.members[ogc_member[a]].cluster = static_cast<int>(c);
      }
    }
  }
  for (const auto& c : rep.distinct) rep.levels.push_back(c.energy);
  rep.count = static_cast<int>(rep.distinct.size());
  rep.meets_target = rep.count >= rep.target;

  for (double c : rep.levels)
    if (!(c > rep.lower_bound && c <= rep.M0_sq * (1.0 + 1e-9))) {
      std::ostringstream msg;
      msg << "level " << c << " outside (" << rep.lower_bound << ", " << rep.M0_sq << "]";
      rep.notes.push_back(msg.str());
    }
  // Symmetric domains (a round disk) carry whole families of OGCs at one level.
  for (std::size_t a = 0; a < rep.levels.size();) {
    std::size_t b = a;
    while (b < rep.levels.size() &&
           std::abs(rep.levels[b] - rep.levels[a]) <= 1e-6 * std::max(1.0, rep.levels[a]))
      ++b;
    if (b - a >= 3) {
      std::ostringstream msg;
      msg << b - a << " distinct OGCs share the level " << rep.levels[a]
          << "; likely a continuum of critical chords";
      rep.notes.push_back(msg.str());
    }
    a = b;
  }
  return rep;
}

}  // namespace ogc
