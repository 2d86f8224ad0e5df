#include "doctest.h"

#include "../support/fixtures.hpp"
#include "ogc/obstacle_flow.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ogc;

namespace {

const MetricField& flat() {
  static const MetricField m = MetricField::euclidean(2);
  return m;
}

const Domain& ellipse() {
  static const Domain d = prepare_domain(fixture::ellipse(), flat(), DomainSettings{});
  return d;
}

const MetricField& jacobi() {
  static const MetricField m = MetricField::jacobi(fixture::oscillator());
  return m;
}

const Domain& omega05() {
  static const Domain d = [] {
    DomainSettings s;
    s.concavity_samples = 256;
    s.k0_samples = 1024;
    return prepare_domain(fixture::omega(0.05, jacobi().well()), jacobi(), s);
  }();
  return d;
}

DiscretePath chord(const Domain& dom, double a, double b, int n) {
  return chord_family(dom, fixture::boundary_at(dom, a), fixture::boundary_at(dom, b), n);
}

// Jacobi chord between boundary points at +-theta pulled onto the boundary arc by the
// pinned-endpoint flow.
FlowConfig pinned(double stall = 0.0) {
  FlowConfig cfg;
  cfg.pinned_endpoints = true;
  cfg.stall = stall;
  return cfg;
}

FlowResult clamped_arc(int n, double stall = 0.0) {
  return eta_flow(omega05(), jacobi(), chord(omega05(), 0.7, -0.7, n), pinned(stall));
}

bool same_nodes(const DiscretePath& a, const DiscretePath& b, double tol) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (size_t i = 0; i < a.nodes.size(); ++i)
    if ((a.nodes[i] - b.nodes[i]).norm() > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("flow config validation") {
  FlowConfig c;
  CHECK_NOTHROW(c.validate());
  c.backtrack = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FlowConfig{};
  c.contact_tol = 0.0;
  try {
    c.validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
}

TEST_CASE("descent step") {
  const FlowConfig cfg;
  SUBCASE("orthogonal chord of the ellipse is fixed") {
    const DiscretePath p = chord(ellipse(), 0.0, std::numbers::pi, 200);
    const StepResult r = v_minus_step(ellipse(), flat(), p, cfg);
    CHECK(r.stalled);
    CHECK(r.accepted);
    CHECK(same_nodes(r.path, p, 1e-12));
    CHECK(r.energy == doctest::Approx(16.0).epsilon(1e-12));
  }
  SUBCASE("constant boundary path is fixed") {
    const Vec A = fixture::boundary_at(ellipse(), 0.4);
    const DiscretePath p(std::vector<Vec>(21, A));
    const StepResult r = v_minus_step(ellipse(), flat(), p, cfg);
    CHECK(r.stalled);
    CHECK(r.energy == 0.0);
    CHECK(same_nodes(r.path, p, 0.0));
  }
  SUBCASE("bent two-segment path in the unit disk") {
    const Domain disk = prepare_domain(fixture::disk(), flat(), DomainSettings{});
    const DiscretePath p({make_vec({1.0, 0.0}), make_vec({0.2, 0.5}), make_vec({0.0, 1.0})});
    // 2 (|(-0.8, 0.5)|^2 + |(-0.2, 0.5)|^2) = 2 (0.89 + 0.29)
    CHECK(path_energy(flat(), p) == doctest::Approx(2.36).epsilon(1e-14));
    const StepResult r = v_minus_step(disk, flat(), p, cfg);
    CHECK_FALSE(r.stalled);
    CHECK(r.energy < 2.36 - 1e-3);
    check_admissible(disk, r.path);
  }
  SUBCASE("energy never increases and paths stay admissible") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 10; ++k) {
      DiscretePath p = chord(omega05(), ang(rng), ang(rng), 60);
      double F = path_energy(jacobi(), p);
      for (int it = 0; it < 15; ++it) {
        const StepResult r = v_minus_step(omega05(), jacobi(), p, cfg);
        CHECK(r.energy <= F);
        p = r.path;
        F = r.energy;
        if (r.stalled) break;
      }
      check_admissible(omega05(), p);
    }
  }
  SUBCASE("reversal equivariance") {
    std::mt19937 rng(23);
    for (int k = 0; k < 10; ++k) {
      const DiscretePath p = fixture::smooth_random_path(omega05(), 40, rng);
      const DiscretePath q = chord_family(omega05(), omega05().project_to_boundary(p.front()),
                                          omega05().project_to_boundary(p.back()), 40);
      const StepResult a = v_minus_step(omega05(), jacobi(), q, cfg);
      const StepResult b = v_minus_step(omega05(), jacobi(), reverse_path(q), cfg);
      CHECK(same_nodes(reverse_path(b.path), a.path, 1e-10));
      CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-12));
    }
  }
}

TEST_CASE("multiplier profile") {
  SUBCASE("interior geodesic has no contact") {
    FlowConfig cfg;
    const FlowResult r = eta_flow(ellipse(), flat(), chord(ellipse(), 0.0, std::numbers::pi, 100), cfg);
    const MultiplierProfile m = multiplier_profile(ellipse(), flat(), r.curve.path);
    CHECK(m.contact.empty());
    CHECK(m.lambda.empty());
    CHECK(m.max_geodesic < 1e-9);
  }
  SUBCASE("clamped concave arc pushes outward and matches the boundary hessian") {
    const FlowResult r = clamped_arc(400, 1e-11);
    const MultiplierProfile m = multiplier_profile(omega05(), jacobi(), r.curve.path, pinned(1e-11));
    REQUIRE(m.contact.size() >= 300);
    for (size_t k = 0; k < m.contact.size(); ++k) {
      CHECK(m.lambda[k] > 0.0);
      CHECK(m.lambda[k] == doctest::Approx(m.expected[k]).epsilon(0.05));
    }
  }
  SUBCASE("non-stalled path is rejected") {
    const DiscretePath p({make_vec({2.0, 0.0}), make_vec({0.5, 0.6}), make_vec({0.0, 0.3}),
                          make_vec({-2.0, 0.0})});
    CHECK_THROWS_AS(multiplier_profile(ellipse(), flat(), p), Error);
  }
}

TEST_CASE("classification") {
  const FlowConfig cfg;
  SUBCASE("ellipse axes are orthogonal chords") {
    const CriticalCurve major = classify(ellipse(), flat(), chord(ellipse(), 0.0, std::numbers::pi, 200), cfg);
    CHECK(major.cls == CurveClass::OGC);
    CHECK(major.energy == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(major.interior_contact.empty());
    const CriticalCurve minor =
        classify(ellipse(), flat(), chord(ellipse(), std::numbers::pi / 2, 3 * std::numbers::pi / 2, 200), cfg);
    CHECK(minor.cls == CurveClass::OGC);
    CHECK(minor.energy == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("constant path is trivial") {
    const DiscretePath p(std::vector<Vec>(11, fixture::boundary_at(ellipse(), 1.0)));
    CHECK(classify(ellipse(), flat(), p, cfg).cls == CurveClass::Trivial);
  }
  SUBCASE("curve hugging the concave boundary") {
    const FlowResult r = clamped_arc(200);
    CHECK(r.curve.cls == CurveClass::ObstacleGeodesic);
    CHECK_FALSE(r.curve.interior_contact.empty());
    CHECK(r.curve.multipliers.min_lambda >= -1e-6);
    CHECK(r.curve.multipliers.max_tangential <= 1e-4);
  }
  SUBCASE("unfinished descent is not classified as critical") {
    const DiscretePath p = chord(ellipse(), 0.2, 2.0, 50);
    CHECK(classify(ellipse(), flat(), p, cfg).cls == CurveClass::Unconverged);
  }
  SUBCASE("reversal") {
    const FlowResult r = clamped_arc(100);
    const CriticalCurve a = classify(omega05(), jacobi(), r.curve.path, cfg);
    const CriticalCurve b = classify(omega05(), jacobi(), reverse_path(r.curve.path), cfg);
    CHECK(a.cls == b.cls);
    CHECK(a.energy == b.energy);
    CHECK(a.interior_contact == b.interior_contact);
    CHECK(a.orth_defect_start == b.orth_defect_start);
  }
}

TEST_CASE("escape fields") {
  FlowConfig cfg;
  SUBCASE("no strip interval is a precondition error") {
    cfg.delta1 = 1e-4;
    const DiscretePath p = chord(ellipse(), std::numbers::pi / 2, 3 * std::numbers::pi / 2, 200);
    CHECK(escape_intervals(ellipse(), p, 1e-4).empty());
    CHECK_THROWS_AS(v_plus_escape(ellipse(), flat(), p, cfg), Error);
  }
  SUBCASE("orthogonal chord of the ellipse admits no descent") {
    const DiscretePath p = chord(ellipse(), std::numbers::pi / 2, 3 * std::numbers::pi / 2, 200);
    const double d1 = ellipse().constants().delta1;
    REQUIRE_FALSE(escape_intervals(ellipse(), p, d1).empty());
    const EscapeResult e = v_plus_escape(ellipse(), flat(), p, cfg);
    CHECK_FALSE(e.descended);
    CHECK(e.energy == path_energy(flat(), p));
  }
  SUBCASE("arc held just below the boundary escapes outward") {
    const FlowResult hug = clamped_arc(200);
    const double d1 = omega05().constants().delta1;
    DiscretePath p = hug.curve.path;
    for (int i = 2; i <= 198; ++i) p.nodes[i] = omega05().push_inward(p.nodes[i], 0.5 * d1);
    p.energy.reset();
    const auto iv = escape_intervals(omega05(), p, d1);
    REQUIRE(iv.size() == 1);
    CHECK(iv[0] == std::make_pair(1, 199));
    const double F0 = path_energy(jacobi(), p);
    const EscapeResult e = v_plus_escape(omega05(), jacobi(), p, cfg);
    CHECK(e.descended);
    CHECK(e.energy < F0);
    check_admissible(omega05(), e.path);
    const EscapeResult er = v_plus_escape(omega05(), jacobi(), reverse_path(p), cfg);
    CHECK(same_nodes(reverse_path(er.path), e.path, 0.0));
  }
}

TEST_CASE("eta flow") {
  const FlowConfig cfg;
  SUBCASE("major axis of the ellipse") {
    const FlowResult r = eta_flow(ellipse(), flat(), chord(ellipse(), 0.0, std::numbers::pi, 200), cfg);
    CHECK(r.curve.cls == CurveClass::OGC);
    CHECK(r.curve.energy == doctest::Approx(16.0).epsilon(1e-10));
    CHECK(r.iterations < 1000);
  }
  SUBCASE("constant path") {
    const DiscretePath p(std::vector<Vec>(41, fixture::boundary_at(ellipse(), 2.0)));
    const FlowResult r = eta_flow(ellipse(), flat(), p, cfg);
    CHECK(r.curve.cls == CurveClass::Trivial);
    CHECK(r.iterations == 0);
    CHECK(same_nodes(r.curve.path, p, 0.0));
  }
  SUBCASE("reversal gives the same trace") {
    for (double a : {0.3, 1.1, 2.9}) {
      const DiscretePath p = chord(omega05(), a, a + 2.0, 80);
      const FlowResult f = eta_flow(omega05(), jacobi(), p, cfg);
      const FlowResult g = eta_flow(omega05(), jacobi(), reverse_path(p), cfg);
      CHECK(f.curve.cls == g.curve.cls);
      REQUIRE(f.trace.size() == g.trace.size());
      for (size_t k = 0; k < f.trace.size(); ++k)
        CHECK(std::abs(f.trace[k].energy - g.trace[k].energy) <= 1e-10);
      CHECK(same_nodes(reverse_path(g.curve.path), f.curve.path, 1e-10));
    }
  }
  SUBCASE("energy trace is monotone") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 8; ++k) {
      const FlowResult r = eta_flow(omega05(), jacobi(), chord(omega05(), ang(rng), ang(rng), 80), cfg);
      for (size_t j = 1; j < r.trace.size(); ++j) CHECK(r.trace[j].energy <= r.trace[j - 1].energy);
    }
  }
  SUBCASE("unconstrained limits are orthogonal chords or trivial") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 8; ++k) {
      const FlowResult r = eta_flow(ellipse(), flat(), chord(ellipse(), ang(rng), ang(rng), 80), cfg);
      CHECK((r.curve.cls == CurveClass::OGC || r.curve.cls == CurveClass::Trivial));
    }
  }
  SUBCASE("halving the initial step leaves the limit energy unchanged") {
    // Minor axis seeded with uneven node spacing.
    std::vector<Vec> x;
    for (int i = 0; i <= 100; ++i) {
      const double s = static_cast<double>(i) / 100;
      x.push_back(make_vec({0.0, 1.0 - 2.0 * (0.6 * s + 0.4 * s * s)}));
    }
    FlowConfig half = cfg;
    half.initial_step = 0.5;
    const FlowResult a = eta_flow(ellipse(), flat(), DiscretePath(x), cfg);
    const FlowResult b = eta_flow(ellipse(), flat(), DiscretePath(x), half);
    CHECK(a.curve.cls == CurveClass::OGC);
    CHECK(b.curve.cls == CurveClass::OGC);
    CHECK(std::abs(a.curve.energy - b.curve.energy) < 1e-6);
    CHECK(a.curve.energy == doctest::Approx(4.0).epsilon(1e-8));
  }
  SUBCASE("initial energy above M0^2 is rejected") {
    FlowConfig c = cfg;
    c.M0_sq = 1.0;
    CHECK_THROWS_AS(eta_flow(ellipse(), flat(), chord(ellipse(), 0.0, std::numbers::pi, 20), c), Error);
  }
}

TEST_CASE("trap surrogates") {
  const FlowConfig cfg;
  const FlowResult hug = clamped_arc(200);
  const TrapStatus t = trap_status(omega05(), jacobi(), hug.curve.path, cfg);
  CHECK(t.in_lambda);
  CHECK(t.avoids_ball);
  CHECK_FALSE(t.in_gamma);
  const TrapStatus e =
      trap_status(ellipse(), flat(), chord(ellipse(), 0.0, std::numbers::pi, 200), cfg);
  CHECK_FALSE(e.in_lambda);
  CHECK_FALSE(e.avoids_ball);
}
