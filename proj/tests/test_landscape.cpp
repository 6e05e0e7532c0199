#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "rsn/landscape.hpp"

using namespace rsn;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EnergyModel three_root_model() {
  // E' sigma^5 = -(s-1)(s-2)(s-4): maximum, minimum, maximum.
  return EnergyModel({{-2.0, -4.0}, {14.0 / 3.0, -3.0}, {-3.5, -2.0}, {1.0, -1.0}});
}

EnergyModel fold_family(double mu) {
  // E' sigma^5 = 3 mu - 7 s + 5 s^2 - s^3; at mu = 1 this is -(s-1)^2 (s-3).
  return EnergyModel({{-0.75 * mu, -4.0}, {7.0 / 3.0, -3.0}, {-2.5, -2.0}, {1.0, -1.0}});
}

}  // namespace

TEST_CASE("evaluate packs the pointwise data", "[landscape]") {
  const EnergyModel m = canonical_model(PhysicalParams{});
  const LandscapeSample s = evaluate(m, 2.0);
  CHECK(s.sigma == 2.0);
  CHECK(s.energy == m.energy(2.0));
  CHECK(s.grad == m.grad(2.0));
  CHECK(s.curvature == m.curvature(2.0));
  CHECK_THROWS_AS(evaluate(m, 0.0), std::invalid_argument);
}

TEST_CASE("closed-form minimum of the three-coefficient landscape", "[landscape]") {
  CHECK_THAT(canonical_root(0.75, 0.39894228040143268, 0.1),
             WithinRel(3.9503045650431895, 1e-13));
  // c = 0 reduces to 2a/b.
  CHECK_THAT(canonical_root(0.75, 0.39894228040143268, 0.0),
             WithinRel(3.7599424119465008, 1e-13));
  CHECK_THROWS_AS(canonical_root(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(canonical_root(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(canonical_root(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("self-gravitating minimum without repulsion", "[landscape]") {
  PhysicalParams p;
  p.lambda = 0.0;
  const StationaryScan scan = stationary_points(canonical_model(p), 0.1, 100.0);
  REQUIRE(scan.points.size() == 1);
  CHECK(scan.warning.empty());
  const StationaryPoint& pt = scan.points[0];
  CHECK(pt.stability == Stability::minimum);
  CHECK_THAT(pt.sigma, WithinRel(3.7599424119465008, 1e-10));
  CHECK_THAT(pt.energy, WithinRel(-0.053051647697298445, 1e-10));
  CHECK(pt.curvature > 0.0);
}

TEST_CASE("regularized minimum with unit coupling", "[landscape]") {
  const StationaryScan scan = stationary_points(canonical_model(PhysicalParams{}), 0.1, 100.0);
  REQUIRE(scan.points.size() == 1);
  const StationaryPoint& pt = scan.points[0];
  CHECK(pt.stability == Stability::minimum);
  CHECK_THAT(pt.sigma, WithinRel(3.8829081906445613, 1e-10));
  CHECK_THAT(pt.energy, WithinRel(-0.051913869502890359, 1e-10));
  CHECK_THAT(pt.curvature, WithinRel(0.0070303809663347648, 1e-8));

  // Window that excludes the minimum.
  const StationaryScan off = stationary_points(canonical_model(PhysicalParams{}), 10.0, 20.0);
  CHECK(off.points.empty());
  CHECK(off.warning.empty());

  CHECK_THROWS_AS(stationary_points(canonical_model(PhysicalParams{}), -1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(stationary_points(canonical_model(PhysicalParams{}), 2.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("bracketed root matches the closed form across random parameters", "[landscape]") {
  std::mt19937 rng(20260818);
  std::uniform_real_distribution<double> logm(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> logl(std::log(0.01), std::log(100.0));

  for (int trial = 0; trial < 50; ++trial) {
    PhysicalParams p;
    p.mass = std::exp(logm(rng));
    p.lambda = std::exp(logl(rng));
    const CanonicalCoefficients k = canonical_coefficients(p);
    const double star = canonical_root(k.a, k.b, k.c);

    const StationaryScan scan =
        stationary_points(canonical_model(p), star / 50.0, star * 50.0);
    REQUIRE(scan.points.size() == 1);
    CHECK(scan.points[0].stability == Stability::minimum);
    CHECK_THAT(scan.points[0].sigma, WithinRel(star, 1e-10));
  }
}

TEST_CASE("three stationary points are located and classified", "[landscape]") {
  const EnergyModel m = three_root_model();

  for (double s : {0.5, 1.5, 3.0, 5.0, 7.0}) {
    const double poly = -(s - 1.0) * (s - 2.0) * (s - 4.0);
    CHECK_THAT(m.grad(s) * std::pow(s, 5.0), WithinRel(poly, 1e-10));
  }

  const StationaryScan scan = stationary_points(m, 0.3, 8.0);
  REQUIRE(scan.points.size() == 3);
  CHECK_THAT(scan.points[0].sigma, WithinRel(1.0, 1e-10));
  CHECK_THAT(scan.points[1].sigma, WithinRel(2.0, 1e-10));
  CHECK_THAT(scan.points[2].sigma, WithinRel(4.0, 1e-10));
  CHECK(scan.points[0].stability == Stability::maximum);
  CHECK(scan.points[1].stability == Stability::minimum);
  CHECK(scan.points[2].stability == Stability::maximum);
  CHECK_THAT(scan.points[1].curvature, WithinRel(0.0625, 1e-9));
  CHECK(scan.points[0].energy > scan.points[1].energy);

  // Determinism: a repeated scan is bitwise identical.
  const StationaryScan again = stationary_points(m, 0.3, 8.0);
  REQUIRE(again.points.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::memcmp(&again.points[i].sigma, &scan.points[i].sigma, sizeof(double)) == 0);
  }
}

TEST_CASE("unresolved root pair raises a warning at the grid cap", "[landscape]") {
  // Roots at 1, 1.02, 3: a 64-node log grid on [0.5, 5] straddles the close
  // pair, so the count moves between 64 and 128 nodes.
  const EnergyModel m({{-0.765, -4.0}, {2.36, -3.0}, {-2.51, -2.0}, {1.0, -1.0}});

  ScanOptions capped;
  capped.initial_grid = 64;
  capped.max_grid = 128;
  const StationaryScan hit = stationary_points(m, 0.5, 5.0, capped);
  CHECK_FALSE(hit.warning.empty());
  CHECK(hit.points.size() == 3);

  ScanOptions roomy;
  roomy.initial_grid = 64;
  const StationaryScan ok = stationary_points(m, 0.5, 5.0, roomy);
  CHECK(ok.warning.empty());
  REQUIRE(ok.points.size() == 3);
  CHECK_THAT(ok.points[0].sigma, WithinAbs(1.0, 1e-6));
  CHECK_THAT(ok.points[1].sigma, WithinAbs(1.02, 1e-6));
  CHECK_THAT(ok.points[2].sigma, WithinAbs(3.0, 1e-6));
}

TEST_CASE("flat tangency is classified as degenerate", "[landscape]") {
  // E' sigma^5 = -(s-1)^3: an odd-order tangency the bisection can bracket.
  const EnergyModel m({{-0.25, -4.0}, {1.0, -3.0}, {-1.5, -2.0}, {1.0, -1.0}});
  const StationaryScan scan = stationary_points(m, 0.3, 5.0);
  REQUIRE(scan.points.size() == 1);
  // Sign bisection on a cubic tangency bottoms out at the evaluation noise
  // floor, |s - 1| ~ cbrt(eps * term scale), so only ~5 digits are available.
  CHECK_THAT(scan.points[0].sigma, WithinAbs(1.0, 2e-5));
  CHECK(scan.points[0].stability == Stability::degenerate);
}

TEST_CASE("fold of the constructed family is pinned to the merge point", "[landscape]") {
  const CriticalPointReport rep =
      find_degenerate(fold_family, 0.7, 1.3, 0.1, 10.0);
  REQUIRE(rep.found);
  CHECK_THAT(rep.sigma_critical, WithinAbs(1.0, 1e-6));
  CHECK_THAT(rep.mu_critical, WithinAbs(1.0, 1e-6));
}

TEST_CASE("mass family of the physical landscape has no fold", "[landscape]") {
  const ModelFamily fam = [](double m) {
    PhysicalParams p;
    p.mass = m;
    return canonical_model(p);
  };

  const CriticalPointReport rep = find_degenerate(fam, 0.1, 10.0, 0.01, 10000.0);
  CHECK_FALSE(rep.found);
  CHECK_THAT(rep.diagnostics, ContainsSubstring("no count change"));

  // A root leaving a too-small window is reported as an edge crossing, not a
  // fold.
  const CriticalPointReport edge = find_degenerate(fam, 0.1, 10.0, 0.01, 1000.0);
  CHECK_FALSE(edge.found);
  CHECK_THAT(edge.diagnostics, ContainsSubstring("window edge"));
}

TEST_CASE("family with no stationary points anywhere", "[landscape]") {
  const ModelFamily fam = [](double) { return EnergyModel({{1.0, -1.0}}); };
  const CriticalPointReport rep = find_degenerate(fam, 0.5, 2.0, 0.1, 10.0);
  CHECK_FALSE(rep.found);
  CHECK_THROWS_AS(find_degenerate(fam, 2.0, 0.5, 0.1, 10.0), std::invalid_argument);
}

TEST_CASE("mass sweep tabulates one branch per mass", "[landscape]") {
  PhysicalParams base;
  const BranchDiagram d = sweep_mass(base, {0.5, 1.0, 2.0}, 0.01, 1000.0);
  REQUIRE(d.rows.size() == 3);
  CHECK(d.warnings.empty());

  CHECK(d.rows[0].control == 0.5);
  CHECK(d.rows[1].control == 1.0);
  CHECK(d.rows[2].control == 2.0);
  for (const BranchRow& r : d.rows) {
    CHECK(r.branch_index == 0);
    CHECK(r.stability == Stability::minimum);
    CHECK(r.energy < 0.0);
  }
  CHECK_THAT(d.rows[0].sigma_star, WithinRel(30.142899468308895, 1e-10));
  CHECK_THAT(d.rows[1].sigma_star, WithinRel(3.8829081906445613, 1e-10));
  CHECK_THAT(d.rows[2].sigma_star, WithinRel(0.65283550337206232, 1e-10));

  CHECK_THROWS_AS(sweep_mass(base, {-1.0}, 0.01, 1000.0), std::invalid_argument);
}
