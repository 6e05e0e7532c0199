#pragma once

// Reduced width dynamics: second-order damped motion
//   M_eff sigma'' + gamma sigma' = -E'(sigma)
// and the overdamped gradient flow
//   sigma' = -Gamma E'(sigma),
// integrated with an adaptive embedded Dormand-Prince 5(4) pair. Accepted
// steps are additionally screened so the relevant Lyapunov function
// (H = M_eff sigma'^2 / 2 + E, or E itself) never increases beyond a 1e-9
// relative slack: a violating step is re-tried at half the step size.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "landscape.hpp"
#include "model.hpp"

namespace rsn {

struct DynamicsConfig {
  double m_eff = 1.5;         // effective inertia (second-order mode)
  double gamma = 1.0;         // damping coefficient
  double big_gamma = 1.0;     // mobility of the gradient flow
  double dt = 1e-3;           // initial step
  double t_end = 100.0;       // horizon
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;     // also the convergence tolerance on |E'|
  double sigma_floor = 1e-6;  // escape bounds
  double sigma_ceiling = 1e6;
};

enum class Terminal { converged, escaped_low, escaped_high, horizon };

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::converged: return "converged";
    case Terminal::escaped_low: return "escaped_low";
    case Terminal::escaped_high: return "escaped_high";
    default: return "horizon";
  }
}

struct TrajectorySample {
  double t = 0.0;
  double sigma = 0.0;
  double sigma_dot = 0.0;
  double energy = 0.0;
  double grad = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // one per accepted step, t strictly increasing
  Terminal terminal = Terminal::horizon;
  double t_final = 0.0;
  double sigma_final = 0.0;
  double sigma_dot_final = 0.0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a2[1] = {1.0 / 5};
  static constexpr double a3[2] = {3.0 / 40, 9.0 / 40};
  static constexpr double a4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
  static constexpr double a5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                                   -212.0 / 729};
  static constexpr double a6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                   -5103.0 / 18656};
  static constexpr double b5[7] = {35.0 / 384,     0.0,          500.0 / 1113, 125.0 / 192,
                                   -2187.0 / 6784, 11.0 / 84,    0.0};
  static constexpr double b4[7] = {5179.0 / 57600,    0.0,         7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

template <std::size_t N>
using StateN = std::array<double, N>;

// One trial step: fills y5 (5th order) and the embedded error estimate.
// Returns false if any stage produced a non-finite value.
template <std::size_t N, typename Rhs>
bool dopri5_step(const Rhs& rhs, double t, const StateN<N>& y, double dt, StateN<N>& y5,
                 StateN<N>& err) {
  using D = Dopri5;
  StateN<N> k[7];
  StateN<N> tmp;
  k[0] = rhs(t, y);
  const auto stage = [&](int s, const double* a) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (int j = 0; j < s; ++j) acc += a[j] * k[j][i];
      tmp[i] = y[i] + dt * acc;
    }
    k[s] = rhs(t + D::c[s] * dt, tmp);
  };
  stage(1, D::a2);
  stage(2, D::a3);
  stage(3, D::a4);
  stage(4, D::a5);
  stage(5, D::a6);
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) acc += D::b5[j] * k[j][i];
    y5[i] = y[i] + dt * acc;
  }
  k[6] = rhs(t + dt, y5);
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 7; ++j) acc += (D::b5[j] - D::b4[j]) * k[j][i];
    err[i] = dt * acc;
    if (!std::isfinite(y5[i]) || !std::isfinite(err[i])) return false;
  }
  return true;
}

template <std::size_t N>
double error_norm(const StateN<N>& y, const StateN<N>& y5, const StateN<N>& err,
                  double rel_tol, double abs_tol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
    const double q = err[i] / scale;
    acc += q * q;
  }
  return std::sqrt(acc / N);
}

// Shared adaptive loop. `lyapunov` maps state to the quantity that must not
// increase; `classify` checks terminal conditions after an accepted step.
template <std::size_t N, typename Rhs, typename Lyap, typename Observe>
Trajectory integrate(const Rhs& rhs, const Lyap& lyapunov, const Observe& observe,
                     StateN<N> y, const DynamicsConfig& cfg, double floor, double ceiling,
                     const std::function<bool(double, const StateN<N>&)>& converged) {
  Trajectory traj;
  double t = 0.0;
  double dt = cfg.dt;
  const double dt_min = 1e-14 * std::max({cfg.t_end, std::fabs(cfg.dt), 1.0});
  double lyap = lyapunov(y);

  traj.samples.push_back(observe(t, y));
  const auto finish = [&](Terminal why) {
    traj.terminal = why;
    traj.t_final = t;
    traj.sigma_final = y[0];
    traj.sigma_dot_final = traj.samples.back().sigma_dot;
    return traj;
  };

  if (!(y[0] > floor)) return finish(Terminal::escaped_low);
  if (!(y[0] < ceiling)) return finish(Terminal::escaped_high);
  if (converged(t, y)) return finish(Terminal::converged);

  while (t < cfg.t_end) {
    if (dt < dt_min)
      throw numeric_error("step size underflow at t=" + fmt17(t) +
                          ", sigma=" + fmt17(y[0]));
    bool clamped = false;
    if (t + dt >= cfg.t_end) {
      dt = cfg.t_end - t;
      clamped = true;
    }

    StateN<N> y5, err;
    if (!dopri5_step<N>(rhs, t, y, dt, y5, err)) {
      dt *= 0.5;
      continue;
    }
    const double en = error_norm<N>(y, y5, err, cfg.rel_tol, cfg.abs_tol);
    if (!(en <= 1.0)) {
      dt *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
      continue;
    }
    const double lyap_new = lyapunov(y5);
    if (!(lyap_new <= lyap + 1e-9 * std::fabs(lyap))) {
      dt *= 0.5;
      continue;
    }

    t = clamped ? cfg.t_end : t + dt;
    y = y5;
    lyap = lyap_new;
    traj.samples.push_back(observe(t, y));

    if (!(y[0] > floor)) return finish(Terminal::escaped_low);
    if (!(y[0] < ceiling)) return finish(Terminal::escaped_high);
    if (converged(t, y)) return finish(Terminal::converged);

    const double grow = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    dt *= std::clamp(grow, 0.2, 5.0);
  }
  return finish(Terminal::horizon);
}

}  // namespace detail

inline Trajectory evolve_damped(const EnergyModel& model, const DynamicsConfig& cfg,
                                double sigma0, double sigma_dot0) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("evolve_damped: sigma0 must be > 0");
  if (!(cfg.m_eff > 0.0)) throw std::invalid_argument("evolve_damped: m_eff must be > 0");
  if (!(cfg.gamma >= 0.0)) throw std::invalid_argument("evolve_damped: gamma must be >= 0");
  if (!(cfg.sigma_floor > 0.0) || !(cfg.sigma_ceiling > cfg.sigma_floor))
    throw std::invalid_argument("evolve_damped: invalid escape bounds");

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto rhs = [&](double, const detail::StateN<2>& y) -> detail::StateN<2> {
    if (!(y[0] > 0.0)) return {nan, nan};
    return {y[1], (-model.grad(y[0]) - cfg.gamma * y[1]) / cfg.m_eff};
  };
  const auto lyap = [&](const detail::StateN<2>& y) {
    if (!(y[0] > 0.0)) return nan;
    return 0.5 * cfg.m_eff * y[1] * y[1] + model.energy(y[0]);
  };
  const auto observe = [&](double t, const detail::StateN<2>& y) {
    return TrajectorySample{t, y[0], y[1], model.energy(y[0]), model.grad(y[0])};
  };
  const std::function<bool(double, const detail::StateN<2>&)> conv =
      [&](double, const detail::StateN<2>& y) {
        return std::fabs(y[1]) + std::fabs(model.grad(y[0])) <= cfg.abs_tol;
      };
  return detail::integrate<2>(rhs, lyap, observe, {sigma0, sigma_dot0}, cfg,
                              cfg.sigma_floor, cfg.sigma_ceiling, conv);
}

inline Trajectory evolve_overdamped(const EnergyModel& model, double big_gamma, double sigma0,
                                    const DynamicsConfig& cfg) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("evolve_overdamped: sigma0 must be > 0");
  if (!(big_gamma > 0.0))
    throw std::invalid_argument("evolve_overdamped: big_gamma must be > 0");
  if (!(cfg.sigma_floor > 0.0) || !(cfg.sigma_ceiling > cfg.sigma_floor))
    throw std::invalid_argument("evolve_overdamped: invalid escape bounds");

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto rhs = [&](double, const detail::StateN<1>& y) -> detail::StateN<1> {
    if (!(y[0] > 0.0)) return {nan};
    return {-big_gamma * model.grad(y[0])};
  };
  const auto lyap = [&](const detail::StateN<1>& y) {
    if (!(y[0] > 0.0)) return nan;
    return model.energy(y[0]);
  };
  const auto observe = [&](double t, const detail::StateN<1>& y) {
    const double g = model.grad(y[0]);
    return TrajectorySample{t, y[0], -big_gamma * g, model.energy(y[0]), g};
  };
  const std::function<bool(double, const detail::StateN<1>&)> conv =
      [&](double, const detail::StateN<1>& y) {
        return std::fabs(model.grad(y[0])) <= cfg.abs_tol;
      };
  return detail::integrate<1>(rhs, lyap, observe, {sigma0}, cfg, cfg.sigma_floor,
                              cfg.sigma_ceiling, conv);
}

struct TimescaleEstimate {
  double tau = 0.0;
  double curvature_at_star = 0.0;
  double mobility = 0.0;
};

// tau = 1 / (Gamma |E''(sigma*)|); undefined at a degenerate point.
inline TimescaleEstimate collapse_timescale(double big_gamma, double curvature_at_star) {
  if (!(big_gamma > 0.0))
    throw std::invalid_argument("collapse_timescale: big_gamma must be > 0");
  if (!std::isfinite(curvature_at_star))
    throw std::invalid_argument("collapse_timescale: non-finite curvature");
  if (curvature_at_star == 0.0)
    throw degenerate_error("collapse_timescale: zero curvature, timescale undefined");
  const double k = std::fabs(curvature_at_star);
  return {1.0 / (big_gamma * k), k, big_gamma};
}

// Gamma = 1 / (m omega) with omega a characteristic internal frequency.
inline double gamma_estimate(const PhysicalParams& p, double omega) {
  validate(p);
  if (!(omega > 0.0)) throw std::invalid_argument("gamma_estimate: omega must be > 0");
  return 1.0 / (p.mass * omega);
}

struct BasinReport {
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  Terminal fate_a = Terminal::horizon;
  Terminal fate_b = Terminal::horizon;
  double sigma_final_a = 0.0;
  double sigma_final_b = 0.0;
  bool separated = false;
};

// Two overdamped runs with identical settings. "Separated" means the fates
// differ, or both converged but to widths further apart than ten times the
// width resolution implied by the gradient tolerance.
inline BasinReport basin_experiment(const EnergyModel& model, double big_gamma,
                                    double sigma_a, double sigma_b,
                                    const DynamicsConfig& cfg) {
  const Trajectory ta = evolve_overdamped(model, big_gamma, sigma_a, cfg);
  const Trajectory tb = evolve_overdamped(model, big_gamma, sigma_b, cfg);
  BasinReport rep;
  rep.sigma_a = sigma_a;
  rep.sigma_b = sigma_b;
  rep.fate_a = ta.terminal;
  rep.fate_b = tb.terminal;
  rep.sigma_final_a = ta.sigma_final;
  rep.sigma_final_b = tb.sigma_final;
  if (ta.terminal != tb.terminal) {
    rep.separated = true;
  } else if (ta.terminal == Terminal::converged) {
    const double ka = std::fabs(model.curvature(ta.sigma_final));
    const double kb = std::fabs(model.curvature(tb.sigma_final));
    const double k = std::max(std::min(ka, kb), 1e-300);
    rep.separated = std::fabs(ta.sigma_final - tb.sigma_final) > 10.0 * cfg.abs_tol / k;
  } else {
    rep.separated = false;
  }
  return rep;
}

}  // namespace rsn
