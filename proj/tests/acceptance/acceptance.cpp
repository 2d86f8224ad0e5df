// Acceptance gate: one PASS/FAIL line per criterion. With an argument k only
// criterion k runs. Exit status is the number of failed criteria.

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "config.hpp"
#include "ogc/brake.hpp"
#include "ogc/minimax.hpp"
#include "ogc/obstacle_flow.hpp"
#include "ogc/oracle.hpp"
#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ogc;
using app::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

app::RunOutput run(const json& doc, const char* command) {
  return app::run_command(app::parse_config(doc), app::RunOptions{command, 1, 0});
}

json oscillator_doc(std::vector<double> lambda, double delta, int grid) {
  return {{"schema", app::kConfigSchema},
          {"well", {{"lambda", lambda}, {"energy", 1.0}}},
          {"domain", {{"kind", "jacobi"}, {"delta", delta}}},
          {"sweep", {{"grid", grid}, {"segments", 200}}}};
}

Vec vec_of(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Axis brake orbits of sum lambda_i^2 x_i^2 at E = 1: brake points +-e_i / lambda_i,
// half-period pi / (sqrt 2 lambda_i). Each one must be matched by some solver orbit.
struct AxisMatch {
  int matched = 0;
  double worst_point = 0.0;
  double worst_period = 0.0;
  double worst_residual = 0.0;
};

AxisMatch match_axis_orbits(const json& orbits, const std::vector<double>& lambda) {
  AxisMatch m;
  for (const auto& o : orbits) m.worst_residual = std::max(m.worst_residual, o["energy_residual"].get<double>());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    Vec tip = Vec::Zero(static_cast<Eigen::Index>(lambda.size()));
    tip[static_cast<Eigen::Index>(i)] = 1.0 / lambda[i];
    const double period = std::numbers::pi / (std::numbers::sqrt2 * lambda[i]);
    double best = std::numeric_limits<double>::infinity(), best_t = 0.0;
    for (const auto& o : orbits) {
      const Vec a = vec_of(o["brake_start"]), b = vec_of(o["brake_end"]);
      const double d = std::min(std::max((a - tip).norm(), (b + tip).norm()),
                                std::max((a + tip).norm(), (b - tip).norm()));
      if (d < best) {
        best = d;
        best_t = std::abs(o["half_period"].get<double>() - period);
      }
    }
    m.worst_point = std::max(m.worst_point, best);
    m.worst_period = std::max(m.worst_period, best_t);
    if (best <= 1e-2 && best_t <= 1e-3) ++m.matched;
  }
  return m;
}

Verdict brake_count_2d() {
  const std::vector<double> lambda = {1.0, std::numbers::sqrt2};
  const auto t0 = std::chrono::steady_clock::now();
  const app::RunOutput out = run(oscillator_doc(lambda, 0.05, 24), "solve-brake");
  const double secs = seconds_since(t0);
  const int count = out.results["orbit_count"].get<int>();
  const AxisMatch m = match_axis_orbits(out.results["orbits"], lambda);
  const bool pass = count >= 2 && m.matched == 2 && m.worst_residual <= 1e-6 && secs <= 120.0;
  return {pass, "orbits=" + std::to_string(count) + " matched=" + std::to_string(m.matched) + "/2 brake_err=" +
                    num(m.worst_point) + " period_err=" + num(m.worst_period) + " residual=" +
                    num(m.worst_residual) + " time=" + num(secs) + "s"};
}

Verdict brake_count_3d() {
  const std::vector<double> lambda = {1.0, std::numbers::sqrt2, std::sqrt(3.0)};
  const auto t0 = std::chrono::steady_clock::now();
  const app::RunOutput out = run(oscillator_doc(lambda, 0.025, 12), "solve-brake");
  const double secs = seconds_since(t0);
  const int count = out.results["orbit_count"].get<int>();
  const AxisMatch m = match_axis_orbits(out.results["orbits"], lambda);
  const bool pass = count >= 3 && m.worst_point <= 1e-2 && secs <= 600.0;
  return {pass, "delta=0.025 orbits=" + std::to_string(count) + " amplitude_err=" + num(m.worst_point) +
                    " residual=" + num(m.worst_residual) + " time=" + num(secs) + "s"};
}

Verdict convex_benchmark() {
  const json doc = {{"schema", app::kConfigSchema},
                    {"domain", {{"kind", "ellipse"}, {"semi_axes", {2.0, 1.0}}}},
                    {"sweep", {{"grid", 24}, {"segments", 200}}},
                    {"oracle", {{"grid", 48}}}};
  const app::RunOutput out = run(doc, "compare");
  const auto levels = out.results["sweep"]["levels"].get<std::vector<double>>();
  const double hd = out.results["ogc_comparison"]["distance"].get<double>();
  bool pass = levels.size() == 2 && hd <= 1e-2;
  std::string lv;
  const double expect[2] = {4.0, 16.0};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    lv += (k ? "," : "") + num(levels[k]);
    if (k < 2) pass = pass && std::abs(levels[k] - expect[k]) <= 0.01 * expect[k];
  }
  return {pass, "count=" + std::to_string(levels.size()) + " levels={" + lv + "} oracle_hausdorff=" + num(hd)};
}

OmegaDelta omega(double delta) {
  OmegaOptions o;
  o.force = true;
  o.certify_samples = 1024;
  o.settings.concavity_samples = 1024;
  return build_omega_delta(fixture::oscillator(), delta, o);
}

Verdict strip_concavity() {
  bool pass = true;
  std::string d;
  for (double delta : {0.1, 0.05, 0.025}) {
    const OmegaDelta od = omega(delta);
    const double margin = od.domain.constants().concavity_margin;
    pass = pass && margin > 0.0;
    d += (d.empty() ? "" : " ") + std::string("delta=") + num(delta) + ":margin=" + num(margin) +
         "(boundary " + num(od.margin) + ",width " + num(od.domain.constants().delta0) + ")";
  }
  return {pass, d + " samples=1024"};
}

Verdict delta_refinement() {
  const std::vector<double> deltas = {0.1, 0.05, 0.025};
  std::vector<std::vector<BrakeOrbit>> sets;
  std::string counts;
  for (double delta : deltas) {
    const OmegaDelta od = omega(delta);
    const MinimaxReport r = family_sweep(od.domain, od.metric, chord_grid(od.domain, 24));
    std::vector<BrakeOrbit> os;
    for (const auto& c : r.distinct) os.push_back(brake_orbit_from_ogc(*od.metric.well(), c));
    counts += (counts.empty() ? "" : ",") + std::to_string(os.size());
    sets.push_back(std::move(os));
  }
  const double d01 = compare_orbit_sets(sets[0], sets[1]).distance;
  const double d12 = compare_orbit_sets(sets[1], sets[2]).distance;
  const double d02 = compare_orbit_sets(sets[0], sets[2]).distance;
  // Below the floor all three sets coincide to integration accuracy and the ordering
  // is noise.
  const double floor = 1e-6;
  const bool decreasing = d12 <= d01 || std::max(d01, d12) <= floor;
  const bool pass = !sets[2].empty() && std::max({d01, d12, d02}) <= 5e-2 && decreasing;
  return {pass, "orbits={" + counts + "} d(0.1,0.05)=" + num(d01) + " d(0.05,0.025)=" + num(d12) +
                    " d(0.1,0.025)=" + num(d02) + " floor=" + num(floor)};
}

Verdict obstacle_fixture() {
  const MetricField jac = MetricField::jacobi(fixture::oscillator());
  DomainSettings s;
  s.concavity_samples = 1024;
  const Domain dom = prepare_domain(fixture::omega(0.05, jac.well()), jac, s);
  FlowConfig cfg;
  cfg.pinned_endpoints = true;
  const DiscretePath p0 =
      chord_family(dom, fixture::boundary_at(dom, 0.7), fixture::boundary_at(dom, -0.7), 200);
  const FlowResult r = eta_flow(dom, jac, p0, cfg);
  const MultiplierProfile& mp = r.curve.multipliers;
  double lo = std::numeric_limits<double>::infinity();
  for (double l : mp.lambda) lo = std::min(lo, l);
  const bool pass = r.curve.cls == CurveClass::ObstacleGeodesic && !mp.contact.empty() && lo >= -1e-6 &&
                    mp.max_tangential <= 1e-4;
  return {pass, std::string("class=") + to_string(r.curve.cls) + " contact=" + std::to_string(mp.contact.size()) +
                    " min_lambda=" + num(lo) + " tangential=" + num(mp.max_tangential)};
}

double fd_relative_error(const MetricField& m, const DiscretePath& p) {
  const auto g = energy_gradient(m, p);
  double err = 0.0, scale = 0.0;
  const double h = 1e-6;
  for (int i = 0; i <= p.segments(); ++i) {
    for (int k = 0; k < p.dim(); ++k) {
      DiscretePath a = p, b = p;
      a.nodes[i][k] += h;
      b.nodes[i][k] -= h;
      const double fd = (path_energy(m, a) - path_energy(m, b)) / (2 * h);
      err = std::max(err, std::abs(fd - g[i][k]));
      scale = std::max(scale, std::abs(g[i][k]));
    }
  }
  return err / std::max(scale, 1.0);
}

double node_gap(const DiscretePath& a, const DiscretePath& b) {
  if (a.nodes.size() != b.nodes.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) d = std::max(d, (a.nodes[i] - b.nodes[i]).norm());
  return d;
}

Verdict property_suite() {
  const MetricField jac = MetricField::jacobi(fixture::oscillator());
  DomainSettings s;
  s.concavity_samples = 256;
  s.k0_samples = 1024;
  const Domain dom = prepare_domain(fixture::omega(0.05, jac.well()), jac, s);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::vector<std::string> failed;
  std::ostringstream d;

  double fd = 0.0;
  for (int k = 0; k < 100; ++k) fd = std::max(fd, fd_relative_error(jac, fixture::random_path(dom, 12, rng)));
  if (fd > 1e-6) failed.push_back("gradient");
  d << "fd=" << num(fd);

  FlowConfig cfg;
  int rises = 0, traces = 0;
  double chord_eq = 0.0, step_eq = 0.0, flow_eq = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Vec A = fixture::boundary_at(dom, ang(rng)), B = fixture::boundary_at(dom, ang(rng));
    const DiscretePath p = chord_family(dom, A, B, 60);
    chord_eq = std::max(chord_eq, node_gap(reverse_path(chord_family(dom, B, A, 60)), p));
    const StepResult a = v_minus_step(dom, jac, p, cfg), b = v_minus_step(dom, jac, reverse_path(p), cfg);
    step_eq = std::max(step_eq, node_gap(reverse_path(b.path), a.path));
    const FlowResult f = eta_flow(dom, jac, p, cfg), g = eta_flow(dom, jac, reverse_path(p), cfg);
    flow_eq = std::max(flow_eq, node_gap(reverse_path(g.curve.path), f.curve.path));
    if (f.trace.size() != g.trace.size()) flow_eq = std::numeric_limits<double>::infinity();
    for (const FlowResult* r : {&f, &g}) {
      ++traces;
      for (std::size_t j = 1; j < r->trace.size(); ++j)
        if (r->trace[j].energy > r->trace[j - 1].energy) ++rises;
    }
  }
  if (rises) failed.push_back("monotone");
  if (std::max({chord_eq, step_eq, flow_eq}) > 1e-10) failed.push_back("equivariance");
  d << " rises=" << rises << "/" << traces << " traces equivariance=" << num(std::max({chord_eq, step_eq, flow_eq}));

  double drift = 0.0;
  GeodesicOptions go;
  go.t_max = 1.0;
  std::uniform_real_distribution<double> box(-0.4, 0.4);
  for (int k = 0; k < 10; ++k) {
    const Vec x0 = make_vec({box(rng), 0.6 * box(rng)});
    const Vec v0 = make_vec({box(rng), box(rng)});
    const auto tr = integrate_geodesic(jac, x0, v0, go);
    const double s0 = jac.quad(x0, v0);
    for (std::size_t i = 0; i < tr.x.size(); ++i) drift = std::max(drift, std::abs(jac.quad(tr.x[i], tr.v[i]) - s0) / s0);
  }
  if (drift > 1e-6) failed.push_back("speed");
  d << " speed_drift=" << num(drift);

  const double K0 = dom.constants().K0;
  const int n = 40;
  const double slack = 1.0 / n;
  std::uniform_int_distribution<int> idx(0, n);
  int increment_bound = 0, strip_bound = 0;
  for (int k = 0; k < 100; ++k) {
    const DiscretePath p = fixture::smooth_random_path(dom, n, rng);
    int a = idx(rng), b = idx(rng);
    if (a > b) std::swap(a, b);
    const double lhs = std::abs(dom.phi(p.nodes[b]) - dom.phi(p.nodes[a]));
    if (lhs > K0 * std::sqrt((b - a) / static_cast<double>(n) * partial_energy(jac, p, a, b)) + slack) ++increment_bound;
    if (strip_min(dom, p, 0, b) < -K0 * std::sqrt(partial_energy(jac, p, 0, b)) - slack) ++strip_bound;
  }
  if (increment_bound || strip_bound) failed.push_back("phi-bound");
  d << " phi_bound_violations=" << increment_bound << "+" << strip_bound;

  int involution = 0;
  for (int k = 0; k < 100; ++k) {
    const DiscretePath p = fixture::random_path(dom, 17, rng);
    if (reverse_path(reverse_path(p)).nodes != p.nodes) ++involution;
  }
  if (involution) failed.push_back("involution");
  d << " involution_failures=" << involution;

  for (const auto& f : failed) d << " FAILED:" << f;
  return {failed.empty(), d.str()};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<Criterion> all = {
      {"brake-count-2d", brake_count_2d},       {"brake-count-3d", brake_count_3d},
      {"ellipse-benchmark", convex_benchmark}, {"strip-concavity", strip_concavity},
      {"delta-refinement", delta_refinement}, {"obstacle-classification", obstacle_fixture},
      {"property-suite", property_suite},
  };
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(all.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], all.size());
      return 64;
    }
  }
  int failures = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (only && static_cast<int>(k) + 1 != only) continue;
    Verdict v;
    try {
      v = all[k].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("[%s] %zu %s: %s\n", v.pass ? "PASS" : "FAIL", k + 1, all[k].name, v.detail.c_str());
  }
  return failures;
}
