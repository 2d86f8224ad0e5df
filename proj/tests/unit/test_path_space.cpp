#include "doctest.h"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "ogc/path_space.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ogc;

namespace {

double fd_relative_error(const MetricField& m, const DiscretePath& p) {
  const auto g = energy_gradient(m, p);
  double num = 0.0, den = 0.0;
  const double h = 1e-6;
  for (int i = 0; i <= p.segments(); ++i) {
    for (int k = 0; k < p.dim(); ++k) {
      DiscretePath a = p, b = p;
      a.nodes[i][k] += h;
      b.nodes[i][k] -= h;
      const double fd = (path_energy(m, a) - path_energy(m, b)) / (2 * h);
      num = std::max(num, std::abs(fd - g[i][k]));
      den = std::max(den, std::abs(g[i][k]));
    }
  }
  return num / std::max(den, 1.0);
}

}  // namespace

TEST_CASE("chord family") {
  const Domain dom = fixture::ellipse();
  const Vec A = make_vec({2.0, 0.0}), B = make_vec({-2.0, 0.0});

  SUBCASE("diagonal pair is constant") {
    const DiscretePath p = chord_family(dom, A, A, 50);
    CHECK(path_energy(MetricField::euclidean(2), p) == 0.0);
    for (const Vec& x : p.nodes) CHECK(x == A);
  }
  SUBCASE("major axis") {
    const DiscretePath p = chord_family(dom, A, B, 100);
    CHECK(p.segments() == 100);
    CHECK(path_energy(MetricField::euclidean(2), p) == doctest::Approx(16.0).epsilon(1e-13));
  }
  SUBCASE("reversal is node-exact") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 6.28);
    for (int k = 0; k < 20; ++k) {
      const Vec P = fixture::boundary_at(dom, ang(rng)), Q = fixture::boundary_at(dom, ang(rng));
      const DiscretePath pq = chord_family(dom, P, Q, 40);
      const DiscretePath qp = chord_family(dom, Q, P, 40);
      const DiscretePath r = reverse_path(pq);
      for (int i = 0; i <= 40; ++i) CHECK(r.nodes[i] == qp.nodes[i]);
    }
  }
  SUBCASE("endpoints off the boundary are rejected") {
    CHECK_THROWS_AS(chord_family(dom, make_vec({0.0, 0.0}), B, 10), Error);
  }
  SUBCASE("concave strip: outside nodes are pulled back") {
    const Domain om = fixture::omega(0.05);
    const Vec P = fixture::boundary_at(om, 0.3), Q = fixture::boundary_at(om, -0.3);
    const DiscretePath p = chord_family(om, P, Q, 60);
    check_admissible(om, p);
    const ContactSet c = contact_set(om, p, 1e-6);
    CHECK(c.intervals.front().first == 0);
    CHECK(c.intervals.back().second == 60);
  }
}

TEST_CASE("path energy") {
  const MetricField flat = MetricField::euclidean(2);
  SUBCASE("flat segment is exact") {
    std::vector<Vec> x;
    for (int i = 0; i <= 7; ++i) x.push_back(make_vec({0.3 * i / 7.0, -0.4 * i / 7.0}));
    CHECK(path_energy(flat, DiscretePath(x)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(path_length(flat, DiscretePath(x)) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("jacobi x-axis chord at constant jacobi speed") {
    const MetricField m = MetricField::jacobi(fixture::oscillator());
    const double target = std::pow(std::numbers::pi / 2.0, 2);
    std::vector<double> F;
    for (int n : {200, 400, 800}) {
      std::vector<Vec> x;
      for (double s : oracle::jacobi_uniform_axis_nodes(n)) x.push_back(make_vec({s, 0.0}));
      F.push_back(path_energy(m, DiscretePath(x)));
    }
    const double e1 = std::abs(F[1] - target), e2 = std::abs(F[2] - target);
    CHECK(e2 < e1);
    // rho vanishes at both ends, so convergence is first order only.
    CHECK(e2 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
    const double order = std::log2((F[0] - F[1]) / (F[1] - F[2]));
    const double extrap = F[2] + (F[2] - F[1]) / (std::pow(2.0, order) - 1.0);
    CHECK(std::abs(extrap - target) < 2e-5);
  }
  SUBCASE("energy dominates squared length") {
    std::mt19937 rng(11);
    const Domain dom = fixture::omega(0.05);
    const MetricField m = MetricField::jacobi(fixture::oscillator());
    for (int k = 0; k < 100; ++k) {
      const DiscretePath p = fixture::random_path(dom, 30, rng);
      const double L = path_length(m, p);
      CHECK(path_energy(m, p) >= L * L * (1.0 - 1e-12));
    }
    std::vector<Vec> x;
    for (int i = 0; i <= 10; ++i) x.push_back(make_vec({0.1 * i, 0.0}));
    const double L = path_length(flat, DiscretePath(x));
    CHECK(path_energy(flat, DiscretePath(x)) == doctest::Approx(L * L).epsilon(1e-13));
  }
  SUBCASE("constant path") {
    const DiscretePath p(std::vector<Vec>(9, make_vec({0.2, 0.1})));
    CHECK(path_energy(MetricField::jacobi(fixture::oscillator()), p) == 0.0);
  }
}

TEST_CASE("energy gradient") {
  std::mt19937 rng(3);
  SUBCASE("finite differences on random jacobi paths") {
    const Domain dom = fixture::omega(0.05);
    const MetricField m = MetricField::jacobi(fixture::oscillator());
    double worst = 0.0;
    for (int k = 0; k < 100; ++k)
      worst = std::max(worst, fd_relative_error(m, fixture::random_path(dom, 12, rng)));
    CHECK(worst < 1e-6);
  }
  SUBCASE("finite differences with a tensor metric") {
    const MetricField m = MetricField::tensor(2, [](const Vec& x) {
      Mat g(2, 2);
      g << 1.0 + x[0] * x[0], 0.3 * x[0] * x[1], 0.3 * x[0] * x[1], 2.0 + x[1] * x[1];
      return g;
    });
    const DiscretePath p = fixture::random_path(fixture::ellipse(), 10, rng);
    CHECK(fd_relative_error(m, p) < 1e-6);
  }
  SUBCASE("straight flat segment is a discrete geodesic") {
    const Domain dom = fixture::ellipse();
    const auto g = energy_gradient(MetricField::euclidean(2),
                                   chord_family(dom, make_vec({2.0, 0.0}), make_vec({0.0, 1.0}), 30));
    for (int i = 1; i < 30; ++i) CHECK(g[i].norm() < 1e-12);
  }
  SUBCASE("constant path") {
    const DiscretePath p(std::vector<Vec>(6, make_vec({0.5, 0.1})));
    for (const Vec& v : energy_gradient(MetricField::jacobi(fixture::oscillator()), p))
      CHECK(v.norm() == 0.0);
  }
}

TEST_CASE("reversal") {
  std::mt19937 rng(5);
  const Domain dom = fixture::omega(0.05);
  const MetricField m = MetricField::jacobi(fixture::oscillator());
  for (int k = 0; k < 20; ++k) {
    const DiscretePath p = fixture::random_path(dom, 21, rng);
    const DiscretePath r = reverse_path(p);
    const DiscretePath rr = reverse_path(r);
    for (int i = 0; i <= 21; ++i) CHECK(rr.nodes[i] == p.nodes[i]);
    CHECK(path_energy(m, r) == path_energy(m, p));
    const auto g = energy_gradient(m, p), gr = energy_gradient(m, r);
    for (int i = 0; i <= 21; ++i) CHECK(gr[21 - i] == g[i]);
    CHECK(reversed_is_canonical(p) != reversed_is_canonical(r));
  }
  const DiscretePath c(std::vector<Vec>(5, make_vec({0.1, 0.2})));
  CHECK(reverse_path(c).nodes == c.nodes);
  CHECK_FALSE(reversed_is_canonical(c));
}

TEST_CASE("dist_star") {
  std::mt19937 rng(9);
  const Domain dom = fixture::ellipse();
  const DiscretePath p = fixture::random_path(dom, 15, rng);
  CHECK(dist_star(p, p) == 0.0);
  DiscretePath q = p;
  const Vec t = make_vec({0.3, -0.4});
  for (Vec& x : q.nodes) x += t;
  CHECK(dist_star(p, q) == doctest::Approx(0.5).epsilon(1e-12));
  for (int k = 0; k < 20; ++k) {
    const DiscretePath a = fixture::random_path(dom, 15, rng), b = fixture::random_path(dom, 15, rng);
    CHECK(dist_star(a, b) == dist_star(b, a));
  }
  CHECK_THROWS_AS(dist_star(p, fixture::random_path(dom, 14, rng)), Error);
}

TEST_CASE("contact set and strip minimum") {
  const Domain dom = fixture::ellipse();
  const DiscretePath axis = chord_family(dom, make_vec({2.0, 0.0}), make_vec({-2.0, 0.0}), 100);

  SUBCASE("convex chord touches only at the ends") {
    const ContactSet c = contact_set(dom, axis, 1e-6);
    REQUIRE(c.intervals.size() == 2);
    CHECK(c.intervals[0] == std::make_pair(0, 0));
    CHECK(c.intervals[1] == std::make_pair(100, 100));
    CHECK(c.interior().empty());
  }
  SUBCASE("path on the boundary") {
    std::vector<Vec> x;
    for (int i = 0; i <= 40; ++i) x.push_back(fixture::boundary_at(dom, 0.05 * i));
    const ContactSet c = contact_set(dom, DiscretePath(x), 1e-6);
    REQUIRE(c.intervals.size() == 1);
    CHECK(c.intervals[0] == std::make_pair(0, 40));
    CHECK(strip_min(dom, DiscretePath(x), 0, 40) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("one dip splits the contact") {
    std::vector<Vec> x;
    for (int i = 0; i <= 40; ++i) x.push_back(fixture::boundary_at(dom, 0.05 * i));
    x[20] = dom.push_inward(x[20], 0.01);
    const ContactSet c = contact_set(dom, DiscretePath(x), 1e-6);
    REQUIRE(c.intervals.size() == 2);
    CHECK(c.intervals[0] == std::make_pair(0, 19));
    CHECK(c.intervals[1] == std::make_pair(21, 40));
    CHECK(c.touches(5));
    CHECK_FALSE(c.touches(20));
  }
  SUBCASE("strip minimum of the major axis") {
    CHECK(strip_min(dom, axis, 0, 100) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(strip_min(dom, axis, 0, 30) > strip_min(dom, axis, 0, 100));
    CHECK_THROWS_AS(strip_min(dom, axis, 40, 30), Error);
    CHECK_THROWS_AS(strip_min(dom, axis, 0, 101), Error);
  }
}

TEST_CASE("phi along paths is controlled by partial energy") {
  std::mt19937 rng(21);
  const auto well = fixture::oscillator();
  DomainSettings s;
  s.concavity_samples = 256;
  s.k0_samples = 1024;
  const MetricField m = MetricField::jacobi(well);
  const Domain dom = prepare_domain(fixture::omega(0.05, well), m, s);
  const double K0 = dom.constants().K0;
  const int n = 40;
  const double slack = 1.0 / n;
  std::uniform_int_distribution<int> idx(0, n);
  for (int k = 0; k < 100; ++k) {
    const DiscretePath p = fixture::smooth_random_path(dom, n, rng);
    int a = idx(rng), b = idx(rng);
    if (a > b) std::swap(a, b);
    const double lhs = std::abs(dom.phi(p.nodes[b]) - dom.phi(p.nodes[a]));
    const double bound = K0 * std::sqrt((b - a) / static_cast<double>(n) * partial_energy(m, p, a, b));
    CHECK(lhs <= bound + slack);

    // Small energy after a boundary node keeps the path near the boundary.
    const double E0 = partial_energy(m, p, 0, b);
    const double delta = K0 * std::sqrt(E0);
    CHECK(strip_min(dom, p, 0, b) >= -delta - slack);
  }
}

TEST_CASE("resampling and hausdorff distance") {
  const Domain dom = fixture::ellipse();
  const DiscretePath p = chord_family(dom, make_vec({2.0, 0.0}), make_vec({-2.0, 0.0}), 50);
  const DiscretePath q = resample_path(dom, p, 200);
  CHECK(q.segments() == 200);
  CHECK(hausdorff(p, q) < 1e-12);
  CHECK(hausdorff(p, reverse_path(p)) == 0.0);
  const DiscretePath minor = chord_family(dom, make_vec({0.0, 1.0}), make_vec({0.0, -1.0}), 50);
  CHECK(hausdorff(p, minor) == doctest::Approx(2.0).epsilon(1e-12));
}
