#include "plasmon/analytic.hpp"
#include "plasmon/error.hpp"
#include "plasmon/np_operator.hpp"
#include "plasmon/spectra.hpp"
#include "plasmon/study.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace plasmon;

TEST_CASE("tail fit on exact sphere data") {
  const auto fit = tail_fit(analytic::asymptote_reference(10));
  CHECK(std::abs(fit.c - 1.0) < 1e-12);
  CHECK(fit.rms_residual < 1e-12);
  CHECK(fit.k_first == 1);
  CHECK(fit.k_last == 10);
  CHECK(fit.points.size() == 10);
}

TEST_CASE("tail fit on a flat spectrum") {
  std::vector<std::pair<int, double>> flat;
  for (int k = 1; k <= 6; ++k) flat.emplace_back(k, -1.0);
  const auto fit = tail_fit(flat);
  CHECK(fit.c == 0.0);
  CHECK(fit.rms_residual == 0.0);
}

TEST_CASE("property: tail fit recovers c from scaled analytic data") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> cs(-3.0, 3.0);
  std::uniform_int_distribution<int> first(1, 20), span(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = cs(rng);
    const int k0 = first(rng);
    const int k1 = k0 + span(rng);
    std::vector<std::pair<int, double>> pts;
    for (int k = k0; k <= k1; ++k) pts.emplace_back(k, -1.0 - c / k);
    const auto fit = tail_fit(pts);
    CHECK(std::abs(fit.c - c) < 1e-12);
    CHECK(fit.rms_residual < 1e-12);
  }
}

TEST_CASE("tail fit needs three points") {
  CHECK_THROWS_AS(tail_fit({{1, -2.0}, {2, -1.5}}), Error);
}

TEST_CASE("geometry specs") {
  const auto s = GeometrySpec::parse("icosphere:3");
  CHECK(s.kind == GeometrySpec::Kind::Icosphere);
  CHECK(s.level == 3);
  CHECK(s.radius == 1.0);
  CHECK(GeometrySpec::parse("icosphere:2:2.5").radius == 2.5);

  const auto e = GeometrySpec::parse("ellipsoid:2,1,0.5:2");
  CHECK(e.kind == GeometrySpec::Kind::Ellipsoid);
  CHECK(e.a == 2.0);
  CHECK(e.c == 0.5);
  CHECK(e.level == 2);
  CHECK(e.build().num_triangles() == 320);

  const auto list = GeometrySpec::parse_list("icosphere:3,ellipsoid:2,1,1:3");
  REQUIRE(list.size() == 2);
  CHECK(list[0].label() == "icosphere:3");
  CHECK(list[1].kind == GeometrySpec::Kind::Ellipsoid);
  CHECK(GeometrySpec::parse(list[1].label()).a == 2.0);

  CHECK_THROWS_AS(GeometrySpec::parse("torus:3"), Error);
  CHECK_THROWS_AS(GeometrySpec::parse("icosphere"), Error);
  CHECK_THROWS_AS(GeometrySpec::parse("icosphere:x"), Error);
  CHECK_THROWS_AS(GeometrySpec::parse("ellipsoid:2,1:3"), Error);
}

TEST_CASE("sphere convergence over levels 1..3") {
  const auto report = converge_sphere({1, 2, 3}, 1.0, {1, 2});
  REQUIRE(report.levels.size() == 3);
  CHECK(report.flags.empty());
  for (int k = 1; k <= 2; ++k) {
    double previous = 1e300;
    for (const auto& level : report.levels) {
      const auto& m = level.matches[static_cast<std::size_t>(k - 1)];
      CHECK(m.k == k);
      CHECK(m.matched);
      CHECK(m.multiplicity == static_cast<std::size_t>(2 * k + 1));
      CHECK(m.eps_oracle == analytic::sphere_eps(k));
      CHECK(m.rel_error < previous);
      previous = m.rel_error;
    }
  }
  CHECK(report.levels[2].n_panels == 1280);
  CHECK(report.levels[2].gauss_error < 0.005);
  CHECK(report.levels[2].gauss_error < report.levels[0].gauss_error);
  CHECK(report.levels[2].matches[0].rel_error < 0.05);
}

TEST_CASE("convergence study argument checks") {
  CHECK_THROWS_AS(converge_sphere({3, 2}, 1.0, {1}), Error);
  CHECK_THROWS_AS(converge_sphere({6}, 1.0, {1}), Error);
  CHECK_THROWS_AS(converge_sphere({2}, 1.0, {5}), Error);
  CHECK_THROWS_AS(converge_sphere({}, 1.0, {1}), Error);
}

TEST_CASE("sphere cluster matching at level 3") {
  const auto modes = solve_modes(assemble(panelize(gen_icosphere(3, 1.0))));
  const auto matches = match_sphere_clusters(modes, 4);
  REQUIRE(matches.size() == 4);
  for (const auto& m : matches) {
    CHECK(m.matched);
    CHECK(m.rel_error < 0.05);
  }
  const auto points = tail_points(modes, TailIndexing::Sphere, 1, 3);
  REQUIRE(points.size() == 3);
  CHECK(points[0].second == doctest::Approx(matches[0].eps_mean));

  const auto fit = tail_fit(modes, TailIndexing::Sphere, 1, 3);
  CHECK(std::abs(fit.c - 1.0) < 0.15);
  CHECK(fit.rms_residual >= 0.0);
}

TEST_CASE("shape statistics") {
  std::vector<std::pair<std::string, SurfaceMesh>> meshes;
  meshes.emplace_back("icosphere:2", gen_icosphere(2, 1.0));
  meshes.emplace_back("ellipsoid:2,1,1:2", gen_ellipsoid(2.0, 1.0, 1.0, 2));
  const auto stats = shape_independence(meshes);
  REQUIRE(stats.size() == 2);
  for (const auto& s : stats) {
    CHECK(s.n_panels == 320);
    CHECK(s.retained > 0);
    CHECK(s.near_minus_one > 0.5);
    CHECK(s.near_minus_one <= 1.0);
    CHECK(std::abs(s.median_low_half_eps + 1.0) < 0.15);
  }
}

TEST_CASE("shape statistics on a synthetic spectrum") {
  ModeSet set;
  Mode mono;
  mono.monopole = true;
  mono.lambda = -1.0;
  set.modes.push_back(mono);
  for (const double eps : {-3.0, -2.0, -1.5, -1.1, -1.05, -1.01}) {
    Mode m;
    m.eps = eps;
    m.lambda = lambda_from_eps(eps);
    set.modes.push_back(m);
  }
  const auto s = shape_stats(set, "synthetic", 12);
  CHECK(s.retained == 6);
  CHECK(s.near_minus_one == doctest::Approx(0.5));
  CHECK(s.median_low_half_eps == doctest::Approx(-1.05));
}
