#pragma once

// Radial field solver on u(r) = r psi(r), uniform grid r_i = i dr, i = 0..n,
// Dirichlet ends. The pair potential is assembled from the shell decomposition
//   U(r) = -G m^2 [ M(r)/r + S(r) ],
//   M(r) = int_0^r 4 pi rho r'^2 dr',  S(r) = int_r^rmax 4 pi rho r' dr',
// both by cumulative trapezoidal quadrature. Scalar observables use composite
// Simpson; the kinetic density uses fourth-order central differences with the
// odd extension u(-r) = -u(r) at the origin. The repulsive term enters the
// Hamiltonian as 2 lambda rho so that T + e_grav + e_rep is the conserved
// functional, with e_grav = (1/2) int rho U and e_rep = lambda int rho^2.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "common.hpp"
#include "model.hpp"

namespace rsn {

struct RadialGrid {
  int n = 4096;        // intervals; nodes 0..n; even, at least 64
  double r_max = 0.0;  // outer radius
  double dr() const { return r_max / n; }
  double r(int i) const { return r_max * i / n; }
};

inline void validate(const RadialGrid& g) {
  if (g.n < 64 || g.n % 2 != 0)
    throw std::invalid_argument("grid: n must be even and at least 64");
  if (!(g.r_max > 0.0)) throw std::invalid_argument("grid: r_max must be > 0");
}

struct RadialState {
  RadialGrid grid;
  std::vector<std::complex<double>> u;  // size n + 1, u[0] = u[n] = 0
};

namespace detail {

inline double simpson(const std::vector<double>& f, double dr) {
  const std::size_t n = f.size() - 1;
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < n; i += 2) odd += f[i];
  for (std::size_t i = 2; i < n; i += 2) even += f[i];
  return dr / 3.0 * (f[0] + 4.0 * odd + 2.0 * even + f[n]);
}

}  // namespace detail

inline double norm(const RadialState& s) {
  std::vector<double> f(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) f[i] = std::norm(s.u[i]);
  return 4.0 * std::numbers::pi * detail::simpson(f, s.grid.dr());
}

// rho_i = |u_i|^2 / r_i^2 with the i = 0 value taken from its neighbor; every
// integrand built from it carries an r^2 factor that kills the origin node.
inline std::vector<double> density(const RadialState& s) {
  std::vector<double> rho(s.u.size());
  for (std::size_t i = 1; i < s.u.size(); ++i) {
    const double ri = s.grid.r(static_cast<int>(i));
    rho[i] = std::norm(s.u[i]) / (ri * ri);
  }
  rho[0] = rho[1];
  return rho;
}

// Normalized Gaussian of width sigma, renormalized on the discrete grid.
inline RadialState gaussian_state(const RadialGrid& g, double sigma) {
  validate(g);
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_state: sigma must be > 0");
  RadialState s{g, std::vector<std::complex<double>>(g.n + 1)};
  const double amp = std::pow(std::numbers::pi * sigma * sigma, -0.75);
  for (int i = 1; i < g.n; ++i) {
    const double r = g.r(i);
    s.u[i] = r * amp * std::exp(-r * r / (2.0 * sigma * sigma));
  }
  const double scale = 1.0 / std::sqrt(norm(s));
  for (auto& v : s.u) v *= scale;
  return s;
}

namespace detail {

inline void require_normalized(const RadialState& s, const char* who) {
  const double nn = norm(s);
  if (!(std::fabs(nn - 1.0) <= 1e-6))
    throw std::invalid_argument(std::string(who) +
                                ": state is not normalized (norm=" + fmt17(nn) + ")");
}

inline std::vector<double> grav_potential_impl(const RadialState& s,
                                               const std::vector<double>& rho,
                                               const PhysicalParams& p) {
  const int n = s.grid.n;
  const double dr = s.grid.dr();
  const double four_pi = 4.0 * std::numbers::pi;
  std::vector<double> f(n + 1), g(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = s.grid.r(i);
    f[i] = four_pi * rho[i] * r * r;
    g[i] = four_pi * rho[i] * r;
  }
  std::vector<double> m_in(n + 1, 0.0), g_cum(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    m_in[i] = m_in[i - 1] + 0.5 * dr * (f[i] + f[i - 1]);
    g_cum[i] = g_cum[i - 1] + 0.5 * dr * (g[i] + g[i - 1]);
  }
  const double gm2 = p.constants.G * p.mass * p.mass;
  std::vector<double> U(n + 1);
  U[0] = -gm2 * g_cum[n];
  for (int i = 1; i <= n; ++i)
    U[i] = -gm2 * (m_in[i] / s.grid.r(i) + (g_cum[n] - g_cum[i]));
  return U;
}

// du/dr at every node: (-u_{i+2} + 8 u_{i+1} - 8 u_{i-1} + u_{i-2}) / (12 dr)
// with u_{-j} = -u_j below the origin and zeros beyond the outer end.
inline std::vector<std::complex<double>> radial_derivative(const RadialState& s) {
  const int n = s.grid.n;
  const double dr = s.grid.dr();
  const auto at = [&](int i) -> std::complex<double> {
    if (i < 0) return -s.u[-i];
    if (i > n) return {0.0, 0.0};
    return s.u[i];
  };
  std::vector<std::complex<double>> up(n + 1);
  for (int i = 0; i <= n; ++i)
    up[i] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dr);
  return up;
}

}  // namespace detail

inline std::vector<double> grav_potential(const RadialState& s, const PhysicalParams& p) {
  validate(s.grid);
  validate(p);
  detail::require_normalized(s, "grav_potential");
  return detail::grav_potential_impl(s, density(s), p);
}

struct FieldObservables {
  double t = 0.0;
  double norm = 0.0;
  double sigma_eff = 0.0;
  double kinetic = 0.0;
  double e_grav = 0.0;
  double e_rep = 0.0;
  double e_total = 0.0;
};

inline FieldObservables energy_components(const RadialState& s, const PhysicalParams& p,
                                          double t = 0.0) {
  validate(s.grid);
  validate(p);
  detail::require_normalized(s, "energy_components");

  const int n = s.grid.n;
  const double dr = s.grid.dr();
  const double four_pi = 4.0 * std::numbers::pi;
  const std::vector<double> rho = density(s);
  const std::vector<double> U = detail::grav_potential_impl(s, rho, p);
  const auto up = detail::radial_derivative(s);

  std::vector<double> f(n + 1);
  FieldObservables out;
  out.t = t;

  for (int i = 0; i <= n; ++i) f[i] = std::norm(s.u[i]);
  out.norm = four_pi * detail::simpson(f, dr);

  for (int i = 0; i <= n; ++i) f[i] = std::norm(up[i]);
  const double h2_2m = p.constants.hbar * p.constants.hbar / (2.0 * p.mass);
  out.kinetic = h2_2m * four_pi * detail::simpson(f, dr);

  for (int i = 0; i <= n; ++i) f[i] = std::norm(s.u[i]) * U[i];
  out.e_grav = 0.5 * four_pi * detail::simpson(f, dr);

  f[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double r = s.grid.r(i);
    f[i] = rho[i] * rho[i] * r * r;
  }
  out.e_rep = p.lambda * four_pi * detail::simpson(f, dr);

  f[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double r = s.grid.r(i);
    f[i] = std::norm(s.u[i]) * r * r;
  }
  const double r2 = four_pi * detail::simpson(f, dr);
  out.sigma_eff = std::sqrt(2.0 * r2 / 3.0);

  out.e_total = out.kinetic + out.e_grav + out.e_rep;
  return out;
}

inline double effective_width(const RadialState& s) {
  validate(s.grid);
  std::vector<double> f(s.u.size());
  f[0] = 0.0;
  for (int i = 1; i <= s.grid.n; ++i) {
    const double r = s.grid.r(i);
    f[i] = std::norm(s.u[i]) * r * r;
  }
  const double four_pi = 4.0 * std::numbers::pi;
  const double r2 = four_pi * detail::simpson(f, s.grid.dr()) / norm(s);
  return std::sqrt(2.0 * r2 / 3.0);
}

enum class Scheme { split_step, crank_nicolson };

inline const char* to_string(Scheme s) {
  return s == Scheme::split_step ? "split_step" : "crank_nicolson";
}

struct PDEConfig {
  PhysicalParams params;
  int n = 4096;
  double r_max = 0.0;      // 0: use 12 x initial width
  double dt = 0.0;         // 0: 0.5 for relaxation, 1e-3 for evolution
  long long max_steps = 4000;
  double energy_tol = 1e-10;
  Scheme scheme = Scheme::split_step;
  double sigma0 = 3.0;
  long long stride = 1;    // observable emission cadence during evolution
};

inline RadialGrid resolve_grid(const PDEConfig& cfg) {
  RadialGrid g{cfg.n, cfg.r_max > 0.0 ? cfg.r_max : 12.0 * cfg.sigma0};
  validate(g);
  return g;
}

namespace detail {

// Tridiagonal solve with constant off-diagonal, in place on d.
inline void thomas(const std::vector<std::complex<double>>& diag, std::complex<double> off,
                   std::vector<std::complex<double>>& d,
                   std::vector<std::complex<double>>& scratch) {
  const std::size_t m = diag.size();
  scratch.resize(m);
  std::complex<double> piv = diag[0];
  scratch[0] = off / piv;
  d[0] /= piv;
  for (std::size_t i = 1; i < m; ++i) {
    piv = diag[i] - off * scratch[i - 1];
    scratch[i] = off / piv;
    d[i] = (d[i] - off * d[i - 1]) / piv;
  }
  for (std::size_t i = m - 1; i-- > 0;) d[i] -= scratch[i] * d[i + 1];
}

}  // namespace detail

struct GroundState {
  RadialState state;
  FieldObservables observables;
  long long sweeps = 0;
};

// Imaginary-time relaxation: Crank-Nicolson sweeps with the mean-field
// potential refreshed and the norm restored every sweep; stop when the total
// energy settles to within energy_tol between checks ten sweeps apart.
inline GroundState ground_state(const PDEConfig& cfg) {
  validate(cfg.params);
  const RadialGrid grid = resolve_grid(cfg);
  if (!(cfg.energy_tol > 0.0))
    throw std::invalid_argument("ground_state: energy_tol must be > 0");
  if (cfg.max_steps < 1) throw std::invalid_argument("ground_state: max_steps must be >= 1");
  const double dtau = cfg.dt > 0.0 ? cfg.dt : 0.5;

  RadialState s = gaussian_state(grid, cfg.sigma0);
  const int n = grid.n;
  const double dr = grid.dr();
  const double hbar = cfg.params.constants.hbar;
  const double k = hbar * hbar / (2.0 * cfg.params.mass * dr * dr);
  const double lam = cfg.params.lambda;

  std::vector<std::complex<double>> diag(n - 1), rhs(n - 1), scratch;
  double e_prev = 0.0;
  bool have_prev = false;

  for (long long sweep = 0; sweep < cfg.max_steps; ++sweep) {
    const std::vector<double> rho = density(s);
    const std::vector<double> U = detail::grav_potential_impl(s, rho, cfg.params);
    const double h = 0.5 * dtau / hbar;
    for (int i = 1; i < n; ++i) {
      const double v = U[i] + 2.0 * lam * rho[i];
      diag[i - 1] = 1.0 + h * (2.0 * k + v);
      rhs[i - 1] = s.u[i] - h * ((2.0 * k + v) * s.u[i] - k * (s.u[i - 1] + s.u[i + 1]));
    }
    detail::thomas(diag, std::complex<double>(-h * k, 0.0), rhs, scratch);
    for (int i = 1; i < n; ++i) s.u[i] = rhs[i - 1];
    s.u[0] = s.u[n] = 0.0;
    const double scale = 1.0 / std::sqrt(norm(s));
    for (auto& v : s.u) v *= scale;

    if (sweep % 10 == 0 || sweep == cfg.max_steps - 1) {
      const FieldObservables obs = energy_components(s, cfg.params);
      if (!std::isfinite(obs.e_total))
        throw numeric_error("ground_state: energy became non-finite");
      if (have_prev && std::fabs(obs.e_total - e_prev) < cfg.energy_tol)
        return {std::move(s), obs, sweep + 1};
      e_prev = obs.e_total;
      have_prev = true;
    }
  }
  throw numeric_error("ground_state: no convergence within " +
                      std::to_string(cfg.max_steps) +
                      " sweeps; last energy " + fmt17(e_prev));
}

struct FieldEvolution {
  std::vector<FieldObservables> series;
  RadialState state;
};

// Real-time propagation. split_step: Strang splitting with unitary Cayley
// half-steps for the kinetic part and an exact phase for the potential part,
// the potential rebuilt from the density after the first half-step.
// crank_nicolson: one full Cayley step with the potential frozen at the start.
// Aborts if the norm drifts from its initial value by more than 1e-6.
inline FieldEvolution evolve_field(const RadialState& initial, const PDEConfig& cfg,
                                   double t_end) {
  validate(initial.grid);
  validate(cfg.params);
  if (!(t_end > 0.0)) throw std::invalid_argument("evolve_field: t_end must be > 0");
  detail::require_normalized(initial, "evolve_field");

  const double dt_req = cfg.dt > 0.0 ? cfg.dt : 1e-3;
  const long long nsteps = std::max(1LL, std::llround(t_end / dt_req));
  const double dt = t_end / static_cast<double>(nsteps);
  const long long stride = std::max(1LL, cfg.stride);

  RadialState s = initial;
  const int n = s.grid.n;
  const double dr = s.grid.dr();
  const double hbar = cfg.params.constants.hbar;
  const double k = hbar * hbar / (2.0 * cfg.params.mass * dr * dr);
  const double lam = cfg.params.lambda;

  FieldEvolution out;
  out.series.push_back(energy_components(s, cfg.params, 0.0));
  const double norm0 = out.series.front().norm;

  std::vector<std::complex<double>> diag(n - 1), rhs(n - 1), scratch;
  const std::complex<double> im(0.0, 1.0);

  // Constant kinetic half-step matrix for the split scheme.
  const std::complex<double> zk_half = im * (dt / (4.0 * hbar)) * k;
  const std::complex<double> diag_half = 1.0 + 2.0 * zk_half;

  const auto kinetic_half = [&]() {
    for (int i = 1; i < n; ++i) {
      diag[i - 1] = diag_half;
      rhs[i - 1] = s.u[i] - zk_half * (2.0 * s.u[i] - (s.u[i - 1] + s.u[i + 1]));
    }
    detail::thomas(diag, -zk_half, rhs, scratch);
    for (int i = 1; i < n; ++i) s.u[i] = rhs[i - 1];
    s.u[0] = s.u[n] = 0.0;
  };

  for (long long step = 1; step <= nsteps; ++step) {
    if (cfg.scheme == Scheme::split_step) {
      kinetic_half();
      const std::vector<double> rho = density(s);
      const std::vector<double> U = detail::grav_potential_impl(s, rho, cfg.params);
      for (int i = 1; i < n; ++i) {
        const double v = U[i] + 2.0 * lam * rho[i];
        s.u[i] *= std::exp(-im * (dt / hbar) * v);
      }
      kinetic_half();
    } else {
      const std::vector<double> rho = density(s);
      const std::vector<double> U = detail::grav_potential_impl(s, rho, cfg.params);
      const std::complex<double> z = im * (dt / (2.0 * hbar));
      for (int i = 1; i < n; ++i) {
        const double v = U[i] + 2.0 * lam * rho[i];
        diag[i - 1] = 1.0 + z * (2.0 * k + v);
        rhs[i - 1] = s.u[i] - z * ((2.0 * k + v) * s.u[i] - k * (s.u[i - 1] + s.u[i + 1]));
      }
      detail::thomas(diag, -z * k, rhs, scratch);
      for (int i = 1; i < n; ++i) s.u[i] = rhs[i - 1];
      s.u[0] = s.u[n] = 0.0;
    }

    const double nn = norm(s);
    if (!(std::fabs(nn / norm0 - 1.0) <= 1e-6))
      throw numeric_error("evolve_field: norm drift at t=" + fmt17(dt * step) +
                          " (norm=" + fmt17(nn) + ")");
    if (step % stride == 0 || step == nsteps)
      out.series.push_back(energy_components(s, cfg.params, dt * step));
  }
  out.state = std::move(s);
  return out;
}

}  // namespace rsn
