#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rsn/dynamics.hpp"
#include "rsn/landscape.hpp"

using namespace rsn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// E = k/2 (sigma - s0)^2 as a power-law triple.
EnergyModel quadratic_well(double k, double s0) {
  return EnergyModel({{0.5 * k, 2.0}, {-k * s0, 1.0}, {0.5 * k * s0 * s0, 0.0}});
}

EnergyModel three_root_model() {
  return EnergyModel({{-2.0, -4.0}, {14.0 / 3.0, -3.0}, {-3.5, -2.0}, {1.0, -1.0}});
}

}  // namespace

TEST_CASE("undamped oscillation tracks the analytic solution", "[dynamics]") {
  const EnergyModel well = quadratic_well(1.0, 2.0);
  DynamicsConfig cfg;
  cfg.m_eff = 1.0;
  cfg.gamma = 0.0;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.t_end = 20.0 * std::numbers::pi;

  const Trajectory tr = evolve_damped(well, cfg, 3.0, 0.0);
  REQUIRE(tr.terminal == Terminal::horizon);
  CHECK(tr.t_final == cfg.t_end);
  REQUIRE(tr.samples.size() > 10);
  CHECK(tr.samples.front().t == 0.0);
  CHECK(tr.samples.front().sigma == 3.0);

  const double h0 = well.energy(3.0);
  for (const TrajectorySample& s : tr.samples) {
    CHECK_THAT(s.sigma, WithinAbs(2.0 + std::cos(s.t), 1e-6));
    CHECK_THAT(s.sigma_dot, WithinAbs(-std::sin(s.t), 1e-6));
    const double h = 0.5 * s.sigma_dot * s.sigma_dot + s.energy;
    CHECK_THAT(h, WithinAbs(h0, 1e-8 * h0));
  }
}

TEST_CASE("damped relaxation matches the two-exponential solution", "[dynamics]") {
  // m = 1, gamma = 3, k = 2: decay rates 1 and 2.
  const EnergyModel well = quadratic_well(2.0, 2.0);
  DynamicsConfig cfg;
  cfg.m_eff = 1.0;
  cfg.gamma = 3.0;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.t_end = 10.0;

  const Trajectory tr = evolve_damped(well, cfg, 3.0, 0.0);
  REQUIRE(tr.terminal == Terminal::horizon);
  double prev_t = -1.0;
  for (const TrajectorySample& s : tr.samples) {
    CHECK(s.t > prev_t);
    prev_t = s.t;
    const double ref = 2.0 + 2.0 * std::exp(-s.t) - std::exp(-2.0 * s.t);
    CHECK_THAT(s.sigma, WithinAbs(ref, 1e-6));
  }
}

TEST_CASE("overdamped flow lands exactly on the horizon", "[dynamics]") {
  const EnergyModel well = quadratic_well(1.0, 2.0);
  DynamicsConfig cfg;
  cfg.t_end = 1.0;

  const Trajectory tr = evolve_overdamped(well, 1.0, 3.0, cfg);
  REQUIRE(tr.terminal == Terminal::horizon);
  CHECK(tr.t_final == 1.0);
  CHECK(tr.samples.back().t == 1.0);
  CHECK_THAT(tr.sigma_final, WithinAbs(2.0 + std::exp(-1.0), 1e-6));
}

TEST_CASE("gradient flow settles into the physical minimum", "[dynamics]") {
  DynamicsConfig cfg;
  cfg.t_end = 6000.0;
  // The stop threshold must sit above the step controller's neutral cycle
  // near the minimum; 3e-9 still pins the width to a quarter of a micro-unit.
  cfg.abs_tol = 3e-9;

  const Trajectory tr =
      evolve_overdamped(canonical_model(PhysicalParams{}), 1.0, 10.0, cfg);
  REQUIRE(tr.terminal == Terminal::converged);
  CHECK_THAT(tr.sigma_final, WithinAbs(3.8829081906445613, 1e-6));
  CHECK(tr.samples.front().energy > tr.samples.back().energy);
}

TEST_CASE("fitted decay rate equals mobility times stiffness", "[dynamics]") {
  const double k = 2.0, big_gamma = 0.5;  // rate = 1
  const EnergyModel well = quadratic_well(k, 2.0);
  DynamicsConfig cfg;
  cfg.t_end = 6.0;

  const Trajectory tr = evolve_overdamped(well, big_gamma, 3.0, cfg);
  REQUIRE(tr.terminal == Terminal::horizon);

  // Least-squares slope of ln|sigma - 2| against t down to one percent of the
  // starting amplitude: two decades of decay.
  double st = 0, sy = 0, stt = 0, sty = 0;
  long long n = 0;
  for (const TrajectorySample& s : tr.samples) {
    const double amp = std::fabs(s.sigma - 2.0);
    if (amp < 1e-2) continue;
    const double y = std::log(amp);
    st += s.t;
    sy += y;
    stt += s.t * s.t;
    sty += s.t * y;
    ++n;
  }
  REQUIRE(n >= 10);
  const double slope = (double(n) * sty - st * sy) / (double(n) * stt - st * st);
  CHECK_THAT(-slope, WithinRel(big_gamma * k, 0.01));
}

TEST_CASE("accepted steps never gain energy", "[dynamics]") {
  std::mt19937 rng(987654321);
  std::uniform_real_distribution<double> logm(std::log(0.2), std::log(5.0));
  std::uniform_real_distribution<double> logl(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> logg(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> logu(std::log(0.5), std::log(2.0));
  std::uniform_real_distribution<double> vel(-0.5, 0.5);

  for (int trial = 0; trial < 20; ++trial) {
    PhysicalParams p;
    p.mass = std::exp(logm(rng));
    p.lambda = std::exp(logl(rng));
    const EnergyModel m = canonical_model(p);
    const CanonicalCoefficients co = canonical_coefficients(p);
    const double star = canonical_root(co.a, co.b, co.c);
    const double sigma0 = star * std::exp(logu(rng));

    DynamicsConfig cfg;
    cfg.t_end = 50.0;
    if (trial % 2 == 0) {
      cfg.m_eff = std::exp(logg(rng));
      cfg.gamma = std::exp(logg(rng));
      const Trajectory tr = evolve_damped(m, cfg, sigma0, vel(rng));
      double prev = std::numeric_limits<double>::infinity();
      for (const TrajectorySample& s : tr.samples) {
        const double h = 0.5 * cfg.m_eff * s.sigma_dot * s.sigma_dot + s.energy;
        CHECK(h <= prev + 1e-9 * std::fabs(prev));
        prev = h;
      }
    } else {
      const double big_gamma = std::exp(logg(rng));
      const Trajectory tr = evolve_overdamped(m, big_gamma, sigma0, cfg);
      double prev = std::numeric_limits<double>::infinity();
      for (const TrajectorySample& s : tr.samples) {
        CHECK(s.energy <= prev + 1e-9 * std::fabs(prev));
        prev = s.energy;
      }
    }
  }
}

TEST_CASE("adjacent starts across the barrier separate", "[dynamics]") {
  DynamicsConfig cfg;
  cfg.t_end = 2000.0;
  cfg.sigma_ceiling = 10.0;
  cfg.rel_tol = 1e-10;  // keeps the step budget below the convergence window

  const BasinReport rep = basin_experiment(three_root_model(), 1.0, 3.9, 4.1, cfg);
  CHECK(rep.fate_a == Terminal::converged);
  CHECK(rep.fate_b == Terminal::escaped_high);
  CHECK(rep.separated);
  CHECK_THAT(rep.sigma_final_a, WithinAbs(2.0, 1e-6));
  CHECK(rep.sigma_final_b >= 10.0);

  // Bitwise reproducibility of the full trajectory.
  const Trajectory a1 = evolve_overdamped(three_root_model(), 1.0, 3.9, cfg);
  const Trajectory a2 = evolve_overdamped(three_root_model(), 1.0, 3.9, cfg);
  REQUIRE(a1.samples.size() == a2.samples.size());
  for (std::size_t i = 0; i < a1.samples.size(); ++i) {
    CHECK(std::memcmp(&a1.samples[i], &a2.samples[i], sizeof(TrajectorySample)) == 0);
  }

  // Starts inside one basin do not separate.
  const BasinReport same = basin_experiment(three_root_model(), 1.0, 1.8, 2.2, cfg);
  CHECK(same.fate_a == Terminal::converged);
  CHECK(same.fate_b == Terminal::converged);
  CHECK_FALSE(same.separated);
}

TEST_CASE("terminal outcomes do not depend on the inertia", "[dynamics]") {
  const EnergyModel m = three_root_model();
  const double starts[] = {0.5, 1.5, 3.0, 3.9, 4.1, 5.0};
  const Terminal expected[] = {Terminal::escaped_low,  Terminal::converged,
                               Terminal::converged,    Terminal::converged,
                               Terminal::escaped_high, Terminal::escaped_high};

  DynamicsConfig over;
  over.t_end = 15000.0;
  over.abs_tol = 1e-8;
  over.sigma_ceiling = 6.0;
  // The low-side fall is a finite-time collapse (grad ~ 1/sigma^5), so the
  // default floor of 1e-6 is unreachable by any step size; 0.05 is still far
  // below the lowest stationary point.
  over.sigma_floor = 0.05;

  for (int i = 0; i < 6; ++i) {
    const Trajectory ref = evolve_overdamped(m, 0.1, starts[i], over);
    CHECK(ref.terminal == expected[i]);
    for (double inertia : {0.1, 1.0, 10.0}) {
      DynamicsConfig cfg = over;
      cfg.m_eff = inertia;
      cfg.gamma = 10.0;  // big_gamma = 1 / gamma
      const Trajectory tr = evolve_damped(m, cfg, starts[i], 0.0);
      CHECK(tr.terminal == ref.terminal);
      if (ref.terminal == Terminal::converged) {
        CHECK_THAT(tr.sigma_final, WithinAbs(ref.sigma_final, 1e-5));
      }
    }
  }
}

TEST_CASE("relaxation timescale from curvature and mobility", "[dynamics]") {
  const TimescaleEstimate t1 = collapse_timescale(1.0, 0.0070303809663347648);
  CHECK_THAT(t1.tau, WithinRel(142.23980247849096, 1e-12));
  CHECK(t1.mobility == 1.0);
  CHECK(t1.curvature_at_star == 0.0070303809663347648);

  const TimescaleEstimate t2 = collapse_timescale(1e14, 6.6743e-24);
  CHECK_THAT(t2.tau, WithinRel(1.4982844642883898e9, 1e-12));

  CHECK_THROWS_AS(collapse_timescale(1.0, 0.0), degenerate_error);
  CHECK_THROWS_AS(collapse_timescale(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(collapse_timescale(1.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("damping coefficient estimate", "[dynamics]") {
  PhysicalParams si;
  si.constants = si_constants();
  si.units = UnitSystem::si;
  si.mass = 1e-17;
  CHECK_THAT(gamma_estimate(si, 1e3), WithinRel(1e14, 1e-12));
  CHECK_THAT(gamma_estimate(PhysicalParams{}, 1.0), WithinRel(1.0, 1e-15));
  CHECK_THROWS_AS(gamma_estimate(si, 0.0), std::invalid_argument);
}

TEST_CASE("step underflow at a finite-time boundary is an error", "[dynamics]") {
  // E = sigma drives the width linearly into the sigma = 0 boundary; with the
  // escape floor far below, the step control collapses and must say so.
  const EnergyModel ramp({{1.0, 1.0}});
  DynamicsConfig cfg;
  cfg.t_end = 2.0;
  cfg.sigma_floor = 1e-300;
  CHECK_THROWS_AS(evolve_overdamped(ramp, 1.0, 1.0, cfg), numeric_error);
}

TEST_CASE("escape through the lower bound", "[dynamics]") {
  // grad ~ 1/sigma^5 below the left maximum, so the fall reaches zero width in
  // finite time; the floor must sit where steps can still resolve the motion.
  DynamicsConfig cfg;
  cfg.sigma_floor = 0.05;
  const Trajectory tr = evolve_overdamped(three_root_model(), 1.0, 0.5, cfg);
  CHECK(tr.terminal == Terminal::escaped_low);
  CHECK(tr.sigma_final <= cfg.sigma_floor);
  CHECK(tr.t_final < cfg.t_end);
}

TEST_CASE("argument validation", "[dynamics]") {
  const EnergyModel m = canonical_model(PhysicalParams{});
  DynamicsConfig cfg;
  CHECK_THROWS_AS(evolve_damped(m, cfg, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve_overdamped(m, 0.0, 1.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(evolve_overdamped(m, 1.0, -2.0, cfg), std::invalid_argument);

  DynamicsConfig bad = cfg;
  bad.m_eff = 0.0;
  CHECK_THROWS_AS(evolve_damped(m, bad, 1.0, 0.0), std::invalid_argument);
  bad = cfg;
  bad.gamma = -1.0;
  CHECK_THROWS_AS(evolve_damped(m, bad, 1.0, 0.0), std::invalid_argument);
  bad = cfg;
  bad.sigma_floor = 2.0;
  bad.sigma_ceiling = 1.0;
  CHECK_THROWS_AS(evolve_damped(m, bad, 1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve_overdamped(m, 1.0, 1.5, bad), std::invalid_argument);
}
