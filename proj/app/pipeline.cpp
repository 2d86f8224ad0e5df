#include "pipeline.hpp"

#include "emit.hpp"
#include "ogc/minimax.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ogc::app {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check-domain", "solve-ogc", "solve-brake", "oracle", "compare"};
  return names;
}

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.begin(), v.end()); }

std::vector<std::string> coord_header(const std::string& prefix, int d) {
  std::vector<std::string> h;
  for (int i = 0; i < d; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

json constants_json(const Domain& dom) {
  const DomainConstants& c = dom.constants();
  return {{"dim", dom.dim()},
          {"kind", dom.kind()},
          {"delta_star", c.delta_star},
          {"delta0", c.delta0},
          {"delta1", c.delta1},
          {"K0", c.K0},
          {"K0_sampled", c.K0_sampled},
          {"x0", vec_json(c.x0)},
          {"rho0", c.rho0},
          {"concavity_margin", c.concavity_margin},
          {"concave", c.concave}};
}

json omega_json(const OmegaDelta& o) {
  return {{"delta", o.delta}, {"margin", o.margin}, {"certified", o.certified}};
}

json curve_json(const CriticalCurve& c) {
  json nodes = json::array();
  for (const Vec& x : c.path.nodes) nodes.push_back(vec_json(x));
  return {{"class", to_string(c.cls)},
          {"energy", c.energy},
          {"length", std::sqrt(c.energy)},
          {"start", vec_json(c.path.front())},
          {"end", vec_json(c.path.back())},
          {"orth_defect_start", c.orth_defect_start},
          {"orth_defect_end", c.orth_defect_end},
          {"stationarity", c.stationarity},
          {"note", c.note},
          {"nodes", nodes}};
}

json orbit_json(const BrakeOrbit& o) {
  return {{"brake_start", vec_json(o.brake_start)},
          {"brake_end", vec_json(o.brake_end)},
          {"half_period", o.half_period},
          {"energy_residual", o.energy_residual},
          {"brake_speed", o.brake_speed},
          {"jacobi_length", o.jacobi_length},
          {"ogc_deviation", o.ogc_deviation},
          {"time_deviation", o.time_deviation},
          {"end_mismatch", o.end_mismatch},
          {"launch_speed_defect", o.launch_speed_defect}};
}

json comparison_json(const SetComparison& c, double tol) {
  return {{"distance", c.distance},
          {"tolerance", tol},
          {"agree", c.distance <= tol},
          {"solver_to_reference", c.a_to_b},
          {"solver_distance", c.a_dist},
          {"reference_to_solver", c.b_to_a},
          {"reference_distance", c.b_dist}};
}

std::string levels_csv(const std::vector<CriticalCurve>& curves, int d) {
  Csv t(join(join({"index", "class", "energy", "length"}, coord_header("start_x", d)), coord_header("end_x", d)));
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const CriticalCurve& c = curves[k];
    t.row().cell(static_cast<int>(k)).cell(to_string(c.cls)).cell(c.energy).cell(std::sqrt(c.energy));
    t.cells(c.path.front()).cells(c.path.back());
  }
  return t.str();
}

std::string curves_csv(const std::vector<CriticalCurve>& curves, int d) {
  Csv t(join({"curve", "node"}, coord_header("x", d)));
  for (std::size_t k = 0; k < curves.size(); ++k)
    for (int i = 0; i <= curves[k].path.segments(); ++i)
      t.row().cell(static_cast<int>(k)).cell(i).cells(curves[k].path.nodes[i]);
  return t.str();
}

std::string orbits_csv(const std::vector<BrakeOrbit>& orbits, int d) {
  Csv t(join(join({"orbit", "t"}, coord_header("q", d)), coord_header("qdot", d)));
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    const BrakeOrbit& o = orbits[k];
    for (std::size_t i = 0; i < o.t.size(); ++i) t.row().cell(static_cast<int>(k)).cell(o.t[i]).cells(o.q[i]).cells(o.qdot[i]);
  }
  return t.str();
}

std::vector<Vec> plane_outline(int dim, const std::function<Vec(const Vec&)>& boundary, int count = 256) {
  std::vector<Vec> pts;
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    Vec u = Vec::Zero(dim);
    u[0] = std::cos(a);
    u[1] = std::sin(a);
    pts.push_back(boundary(u));
  }
  return pts;
}

std::pair<Vec, Vec> bounds(const std::vector<Vec>& pts) {
  Vec lo = pts.front().head(2), hi = lo;
  for (const Vec& p : pts) {
    lo = lo.cwiseMin(p.head(2));
    hi = hi.cwiseMax(p.head(2));
  }
  return {lo, hi};
}

std::string plot_curves(const Domain& dom, const std::vector<std::vector<Vec>>& curves,
                        const std::vector<Vec>* hill = nullptr) {
  const std::vector<Vec> outline = plane_outline(dom.dim(), [&](const Vec& u) { return dom.boundary_point(u); });
  auto [lo, hi] = bounds(hill ? *hill : outline);
  Svg s(lo, hi);
  if (hill) s.polyline(*hill, "#888888", 1.0, true, "4 3");
  s.polyline(outline, "#000000", 1.5, true);
  for (std::size_t k = 0; k < curves.size(); ++k) {
    s.polyline(curves[k], Svg::palette(static_cast<int>(k)), 2.0);
    s.marker(curves[k].front(), Svg::palette(static_cast<int>(k)));
    s.marker(curves[k].back(), Svg::palette(static_cast<int>(k)));
  }
  if (dom.dim() > 2) s.label(lo, "projection onto (x0, x1)");
  return s.str();
}

struct Solve {
  MinimaxReport report;
  std::vector<BrakeOrbit> orbits;
  std::vector<std::string> orbit_notes;
};

MinimaxReport sweep(const Problem& p, const RunConfig& cfg, const RunOptions& opt) {
  SweepConfig sc;
  sc.flow = cfg.flow;
  sc.segments = cfg.sweep.segments;
  sc.dedup_tol = cfg.sweep.dedup_tol;
  sc.threads = opt.threads;
  sc.keep_traces = cfg.sweep.keep_traces;
  return family_sweep(p.domain, p.metric, chord_grid(p.domain, cfg.sweep.grid), sc);
}

void brake_orbits(const Problem& p, const RunConfig& cfg, Solve& s) {
  for (std::size_t k = 0; k < s.report.distinct.size(); ++k) {
    try {
      s.orbits.push_back(brake_orbit_from_ogc(*p.well, s.report.distinct[k], cfg.brake));
    } catch (const Error& e) {
      s.orbit_notes.push_back("orbit from curve " + std::to_string(k) + " failed: " + e.what());
    }
  }
}

json sweep_json(const MinimaxReport& r, const RunConfig& cfg) {
  json hist;
  for (int k = 0; k < 5; ++k) hist[to_string(static_cast<CurveClass>(k))] = r.histogram[k];
  json curves = json::array();
  for (const auto& c : r.distinct) curves.push_back(curve_json(c));
  return {{"grid", cfg.sweep.grid},
          {"members", r.members.size()},
          {"count", r.count},
          {"target", r.target},
          {"meets_target", r.meets_target},
          {"levels", r.levels},
          {"lower_bound", r.lower_bound},
          {"M0_sq", r.M0_sq},
          {"dedup_tol", r.dedup_tol},
          {"histogram", hist},
          {"notes", r.notes},
          {"curves", curves}};
}

void sweep_files(const MinimaxReport& r, const RunConfig& cfg, int d, RunOutput& out) {
  out.files.push_back({"levels.csv", levels_csv(r.distinct, d)});
  out.files.push_back({"curves.csv", curves_csv(r.distinct, d)});
  Csv m({"member", "i", "j", "class", "initial_energy", "energy", "iterations", "escapes", "cluster"});
  for (std::size_t k = 0; k < r.members.size(); ++k) {
    const MemberOutcome& mo = r.members[k];
    m.row().cell(static_cast<int>(k)).cell(mo.i).cell(mo.j).cell(to_string(mo.cls));
    m.cell(mo.initial_energy).cell(mo.energy).cell(mo.iterations).cell(mo.escapes).cell(mo.cluster);
  }
  out.files.push_back({"members.csv", m.str()});
  if (cfg.sweep.keep_traces) {
    Csv t({"member", "iteration", "energy", "state", "strip_min", "in_lambda", "in_gamma"});
    for (std::size_t k = 0; k < r.members.size(); ++k)
      for (const TraceRow& row : r.members[k].trace) {
        t.row().cell(static_cast<int>(k)).cell(row.iteration).cell(row.energy).cell(row.state);
        t.cell(row.strip_min).cell(static_cast<int>(row.in_lambda)).cell(static_cast<int>(row.in_gamma));
      }
    out.files.push_back({"traces.csv", t.str()});
  }
}

std::vector<std::vector<Vec>> node_lists(const std::vector<CriticalCurve>& cs) {
  std::vector<std::vector<Vec>> out;
  for (const auto& c : cs) out.push_back(c.path.nodes);
  return out;
}

std::vector<std::vector<Vec>> sample_lists(const std::vector<BrakeOrbit>& os, int samples) {
  std::vector<std::vector<Vec>> out;
  for (const auto& o : os) {
    std::vector<Vec> pts;
    for (int i = 0; i <= samples; ++i) pts.push_back(o.at(o.half_period * i / samples));
    out.push_back(std::move(pts));
  }
  return out;
}

std::vector<Vec> hill_outline(const PotentialWell& w) {
  return plane_outline(w.dim(), [&](const Vec& u) { return w.boundary_point(u); });
}

// ---------------------------------------------------------------------------

void check_domain(const RunConfig& cfg, const RunOptions& opt, RunOutput& out) {
  const Problem p = build_problem(cfg, true);
  const Domain& dom = p.domain;
  json& r = out.results;
  r["domain"] = constants_json(dom);
  if (p.omega) r["omega"] = omega_json(*p.omega);

  const double ds = dom.constants().delta_star;
  const std::vector<double> ladder = cfg.settings.ladder.empty() ? geometric_ladder(ds, 0.5, 8) : cfg.settings.ladder;
  const Delta0Result d0 = compute_delta0(dom, p.metric, ladder, cfg.settings.concavity_samples);
  Csv lc({"delta", "margin"});
  json rungs = json::array();
  for (const LadderRung& g : d0.rungs) {
    lc.row().cell(g.delta).cell(g.margin);
    rungs.push_back({{"delta", g.delta}, {"margin", g.margin}});
  }
  r["ladder"] = rungs;
  out.files.push_back({"ladder.csv", lc.str()});

  // Unit gradient norm on the exact strip at seeded random points.
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> depth(0.0, 0.99 * dom.level_set().exact_width());
  double worst = 0.0;
  for (int k = 0; k < cfg.verify_samples; ++k) {
    Vec u(dom.dim());
    for (int i = 0; i < dom.dim(); ++i) u[i] = normal(rng);
    const double dd = depth(rng);
    const Vec x = dom.push_inward(dom.boundary_point(u.normalized()), dd);
    worst = std::max(worst, std::abs(std::sqrt(p.metric.covector_norm_sq(x, dom.grad_phi(x))) - 1.0));
  }
  r["gradient_norm_check"] = {{"samples", cfg.verify_samples}, {"seed", opt.seed}, {"max_deviation", worst}};

  const std::vector<Vec> outline = plane_outline(dom.dim(), [&](const Vec& u) { return dom.boundary_point(u); });
  std::vector<Vec> inner;
  const double drawn = std::min(dom.constants().delta0, 0.99 * dom.level_set().exact_width());
  for (const Vec& b : outline) inner.push_back(dom.push_inward(b, drawn));
  std::vector<Vec> ball;
  for (int k = 0; k < 128; ++k) {
    Vec q = dom.constants().x0;
    q[0] += dom.constants().rho0 * std::cos(2.0 * std::numbers::pi * k / 128);
    q[1] += dom.constants().rho0 * std::sin(2.0 * std::numbers::pi * k / 128);
    ball.push_back(q);
  }
  auto [lo, hi] = bounds(outline);
  Svg s(lo, hi);
  s.polyline(outline, "#000000", 1.5, true);
  s.polyline(inner, "#1f77b4", 1.0, true, "4 3");
  s.polyline(ball, "#d62728", 1.0, true);
  out.files.push_back({"domain.svg", s.str()});
  out.log.push_back("check-domain: concave=" + std::string(dom.constants().concave ? "true" : "false"));
}

void solve_ogc(const RunConfig& cfg, const RunOptions& opt, RunOutput& out) {
  const Problem p = build_problem(cfg);
  const MinimaxReport rep = sweep(p, cfg, opt);
  out.results["domain"] = constants_json(p.domain);
  if (p.omega) out.results["omega"] = omega_json(*p.omega);
  out.results["sweep"] = sweep_json(rep, cfg);
  sweep_files(rep, cfg, p.domain.dim(), out);
  out.files.push_back({"ogcs.svg", plot_curves(p.domain, node_lists(rep.distinct))});
  out.log.push_back("solve-ogc: " + std::to_string(rep.count) + " distinct OGCs");
}

Solve solve_brake_core(const Problem& p, const RunConfig& cfg, const RunOptions& opt) {
  Solve s;
  s.report = sweep(p, cfg, opt);
  brake_orbits(p, cfg, s);
  return s;
}

void require_jacobi(const RunConfig& cfg, const std::string& cmd) {
  if (!cfg.domain) throw ConfigError("/domain", cmd + " needs a domain");
  if (cfg.domain->kind != "jacobi") throw ConfigError("/domain/kind", cmd + " needs a jacobi domain");
}

void solve_brake(const RunConfig& cfg, const RunOptions& opt, RunOutput& out) {
  require_jacobi(cfg, "solve-brake");
  const Problem p = build_problem(cfg);
  const Solve s = solve_brake_core(p, cfg, opt);
  out.results["domain"] = constants_json(p.domain);
  out.results["omega"] = omega_json(*p.omega);
  out.results["sweep"] = sweep_json(s.report, cfg);
  json orbits = json::array();
  for (const auto& o : s.orbits) orbits.push_back(orbit_json(o));
  out.results["orbits"] = orbits;
  out.results["orbit_count"] = s.orbits.size();
  out.results["orbit_notes"] = s.orbit_notes;
  sweep_files(s.report, cfg, p.domain.dim(), out);
  out.files.push_back({"orbits.csv", orbits_csv(s.orbits, p.domain.dim())});
  const std::vector<Vec> hill = hill_outline(*p.well);
  out.files.push_back({"orbits.svg", plot_curves(p.domain, sample_lists(s.orbits, cfg.orbit_samples), &hill)});
  out.log.push_back("solve-brake: " + std::to_string(s.orbits.size()) + " brake orbits");
}

struct OracleRun {
  std::optional<ShootingResult> shooting;
  std::optional<OscillatorReference> closed;
  std::vector<std::string> notes;
};

OracleRun oracle_core(const RunConfig& cfg, const RunOptions& opt, const Problem* p) {
  OracleRun o;
  if (p && p->domain.dim() == 2) {
    ShootOptions so = cfg.shoot;
    so.threads = opt.threads;
    o.shooting = shoot_ogc_2d(p->domain, p->metric, cfg.oracle_grid, so);
  } else if (p) {
    o.notes.push_back("shooting skipped: only dimension 2");
  }
  if (cfg.well && !cfg.well->lambda.empty()) {
    o.closed = oscillator_reference(cfg.well->lambda, cfg.well->energy, cfg.orbit_samples);
  } else if (cfg.well) {
    o.notes.push_back("closed forms skipped: the well is not an oscillator");
  }
  if (!o.shooting && !o.closed)
    throw Error(ErrorCode::Unsupported, "oracle: needs a 2D domain or an oscillator well");
  return o;
}

json shooting_json(const ShootingResult& s, int grid) {
  json curves = json::array();
  for (const auto& c : s.ogcs) curves.push_back(curve_json(c));
  return {{"grid", grid},
          {"roots", s.roots},
          {"skipped", s.skipped},
          {"continuum", s.continuum},
          {"count", s.ogcs.size()},
          {"notes", s.notes},
          {"curves", curves}};
}

void oracle(const RunConfig& cfg, const RunOptions& opt, RunOutput& out) {
  std::optional<Problem> p;
  if (cfg.domain) p = build_problem(cfg, true);
  const OracleRun o = oracle_core(cfg, opt, p ? &*p : nullptr);
  out.results["notes"] = o.notes;
  if (o.shooting) {
    out.results["domain"] = constants_json(p->domain);
    out.results["shooting"] = shooting_json(*o.shooting, cfg.oracle_grid);
    Csv t({"theta", "returned", "defect", "length"});
    for (const Shot& s : o.shooting->samples)
      t.row().cell(s.theta).cell(static_cast<int>(s.returned)).cell(s.defect).cell(s.length);
    out.files.push_back({"shots.csv", t.str()});
    out.files.push_back({"levels.csv", levels_csv(o.shooting->ogcs, 2)});
    out.files.push_back({"curves.csv", curves_csv(o.shooting->ogcs, 2)});
    out.files.push_back({"ogcs.svg", plot_curves(p->domain, node_lists(o.shooting->ogcs))});
  }
  if (o.closed) {
    json orbits = json::array();
    for (const auto& b : o.closed->orbits) orbits.push_back(orbit_json(b));
    out.results["closed_form"] = {{"orbits", orbits}, {"warnings", o.closed->warnings}};
    out.files.push_back({"orbits.csv", orbits_csv(o.closed->orbits, static_cast<int>(cfg.well->lambda.size()))});
  }
  out.log.push_back("oracle: done");
}

void compare(const RunConfig& cfg, const RunOptions& opt, RunOutput& out) {
  if (!cfg.domain) throw ConfigError("/domain", "compare needs a domain");
  const Problem p = build_problem(cfg);
  Solve s;
  if (cfg.domain->kind == "jacobi") {
    s = solve_brake_core(p, cfg, opt);
  } else {
    s.report = sweep(p, cfg, opt);
  }
  const OracleRun o = oracle_core(cfg, opt, &p);
  out.results["domain"] = constants_json(p.domain);
  out.results["sweep"] = sweep_json(s.report, cfg);
  out.results["notes"] = o.notes;
  bool agree = true;
  bool any = false;
  if (o.shooting) {
    const SetComparison c = compare_curve_sets(s.report.distinct, o.shooting->ogcs);
    out.results["ogc_comparison"] = comparison_json(c, cfg.compare_tolerance);
    out.results["oracle_levels"] = [&] {
      std::vector<double> v;
      for (const auto& x : o.shooting->ogcs) v.push_back(x.energy);
      return v;
    }();
    agree = agree && c.distance <= cfg.compare_tolerance;
    any = true;
  }
  if (o.closed && cfg.domain->kind == "jacobi") {
    const SetComparison c = compare_orbit_sets(s.orbits, o.closed->orbits);
    out.results["orbit_comparison"] = comparison_json(c, cfg.compare_tolerance);
    json orbits = json::array();
    for (const auto& b : s.orbits) orbits.push_back(orbit_json(b));
    out.results["orbits"] = orbits;
    agree = agree && c.distance <= cfg.compare_tolerance;
    any = true;
  }
  if (!any) throw Error(ErrorCode::Unsupported, "compare: no oracle applies to this configuration");
  out.results["agree"] = agree;
  out.log.push_back(std::string("compare: agree=") + (agree ? "true" : "false"));
}

}  // namespace

RunOutput run_command(const RunConfig& cfg, const RunOptions& opt) {
  require(opt.threads >= 1, ErrorCode::Config, "threads must be >= 1");
  RunOutput out;
  out.results["schema"] = kResultsSchema;
  out.results["command"] = opt.command;
  out.results["status"] = "ok";
  out.results["seed"] = opt.seed;
  out.results["config"] = to_json(cfg);
  if (opt.command == "check-domain") {
    check_domain(cfg, opt, out);
  } else if (opt.command == "solve-ogc") {
    solve_ogc(cfg, opt, out);
  } else if (opt.command == "solve-brake") {
    solve_brake(cfg, opt, out);
  } else if (opt.command == "oracle") {
    oracle(cfg, opt, out);
  } else if (opt.command == "compare") {
    compare(cfg, opt, out);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown command " + opt.command);
  }
  return out;
}

json error_document(const std::string& command, const Error& e) {
  json err = {{"code", to_string(e.code())}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["pointer"] = ce->pointer();
  return {{"schema", kResultsSchema},
          {"command", command},
          {"status", e.code() == ErrorCode::Config ? "config-error" : "error"},
          {"error", err}};
}

int exit_code(const Error& e) { return e.code() == ErrorCode::Config ? 2 : 1; }

}  // namespace ogc::app
