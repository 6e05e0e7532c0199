#pragma once

// Landscape analysis: sample the reduced energy and its derivatives, locate
// and classify stationary points by bracketed bisection on a log grid,
// detect degenerate (fold) points across one-parameter families, and build
// branch diagrams versus mass.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "model.hpp"

namespace rsn {

struct LandscapeSample {
  double sigma = 0.0;
  double energy = 0.0;
  double grad = 0.0;
  double curvature = 0.0;
};

enum class Stability { minimum, maximum, degenerate };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::minimum: return "minimum";
    case Stability::maximum: return "maximum";
    default: return "degenerate";
  }
}

struct StationaryPoint {
  double sigma = 0.0;
  double energy = 0.0;
  double curvature = 0.0;
  Stability stability = Stability::minimum;
};

// points sorted by sigma; warning is empty unless the scan could not
// certify a stable root count at the grid-density cap.
struct StationaryScan {
  std::vector<StationaryPoint> points;
  std::string warning;
};

struct ScanOptions {
  int initial_grid = 4096;      // log-grid nodes for the sign scan
  int max_grid = 1 << 20;       // density cap for automatic refinement
  double rel_width = 1e-12;     // bisection stop: bracket width / sigma
  double degenerate_tol = 1e-8; // |E''| below this fraction of its term
                                // magnitude sum classifies "degenerate"
};

inline LandscapeSample evaluate(const EnergyModel& model, double sigma) {
  LandscapeSample s;
  s.sigma = sigma;
  s.energy = model.energy(sigma);
  s.grad = model.grad(sigma);
  s.curvature = model.curvature(sigma);
  if (!std::isfinite(s.energy) || !std::isfinite(s.grad) || !std::isfinite(s.curvature))
    throw numeric_error("evaluate: non-finite landscape value at sigma=" + fmt17(sigma));
  return s;
}

// Unique positive root of b s^2 - 2 a s - 3 c = 0 (that is, of E' for the
// canonical model): s = (2a + sqrt(4a^2 + 12 b c)) / (2 b). Serves as an
// independent oracle for the bracketing path.
inline double canonical_root(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0) || !(c >= 0.0))
    throw std::invalid_argument("canonical_root: requires a, b > 0 and c >= 0");
  return (2.0 * a + std::sqrt(4.0 * a * a + 12.0 * b * c)) / (2.0 * b);
}

namespace detail {

// One sign scan at a fixed grid density. Returns bracket endpoints
// (lo, hi index pairs as sigma values) plus exact-zero nodes.
struct SignScan {
  std::vector<std::pair<double, double>> brackets;
  std::vector<double> exact_zeros;
  std::size_t count() const { return brackets.size() + exact_zeros.size(); }
};

inline SignScan sign_scan(const EnergyModel& model, double lo, double hi, int grid) {
  SignScan out;
  const double dlog = std::log(hi / lo) / grid;
  double x_prev = lo;
  double g_prev = model.grad(x_prev);
  if (!std::isfinite(g_prev))
    throw numeric_error("stationary_points: non-finite gradient at sigma=" + fmt17(x_prev));
  if (g_prev == 0.0) out.exact_zeros.push_back(x_prev);
  for (int i = 1; i <= grid; ++i) {
    const double x = (i == grid) ? hi : lo * std::exp(i * dlog);
    const double g = model.grad(x);
    if (!std::isfinite(g))
      throw numeric_error("stationary_points: non-finite gradient at sigma=" + fmt17(x));
    if (g == 0.0)
      out.exact_zeros.push_back(x);
    else if (g_prev != 0.0 && ((g_prev < 0.0) != (g < 0.0)))
      out.brackets.emplace_back(x_prev, x);
    x_prev = x;
    g_prev = g;
  }
  return out;
}

inline double bisect_grad(const EnergyModel& model, double a, double b, double rel_width) {
  double ga = model.grad(a);
  while (b - a > rel_width * b) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // interval at floating-point resolution
    const double gm = model.grad(m);
    if (gm == 0.0) return m;
    if ((ga < 0.0) == (gm < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

inline StationaryScan stationary_points(const EnergyModel& model, double lo, double hi,
                                        const ScanOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("stationary_points: window must satisfy 0 < lo < hi");

  // Refine until two consecutive densities agree on the root count; a count
  // still moving at the cap is reported, not silently accepted.
  detail::SignScan scan = detail::sign_scan(model, lo, hi, opt.initial_grid);
  std::string warning;
  int grid = opt.initial_grid;
  while (true) {
    if (grid * 2 > opt.max_grid) {
      warning = "root count did not stabilize at " + std::to_string(grid) +
                " grid nodes; rerun with a denser scan or a narrower window";
      break;
    }
    detail::SignScan finer = detail::sign_scan(model, lo, hi, grid * 2);
    const bool stable = finer.count() == scan.count();
    scan = std::move(finer);
    grid *= 2;
    if (stable) break;
  }

  StationaryScan out;
  out.warning = std::move(warning);
  for (const auto& [a, b] : scan.brackets)
    out.points.push_back({detail::bisect_grad(model, a, b, opt.rel_width), 0.0, 0.0,
                          Stability::minimum});
  for (double z : scan.exact_zeros)
    out.points.push_back({z, 0.0, 0.0, Stability::minimum});
  std::sort(out.points.begin(), out.points.end(),
            [](const StationaryPoint& x, const StationaryPoint& y) {
              return x.sigma < y.sigma;
            });
  for (StationaryPoint& p : out.points) {
    p.energy = model.energy(p.sigma);
    p.curvature = model.curvature(p.sigma);
    const double scale = model.curvature_scale(p.sigma);
    if (std::fabs(p.curvature) <= opt.degenerate_tol * scale)
      p.stability = Stability::degenerate;
    else
      p.stability = p.curvature > 0.0 ? Stability::minimum : Stability::maximum;
  }

  // Canonical models carry a closed-form root; use it as an internal oracle.
  if (model.label() == "canonical") {
    double a = 0.0, b = 0.0, c = 0.0;
    for (const PowerLawTerm& t : model.terms()) {
      if (t.exponent == -2.0) a = t.coeff;
      if (t.exponent == -1.0) b = -t.coeff;
      if (t.exponent == -3.0) c = t.coeff;
    }
    if (a > 0.0 && b > 0.0 && c >= 0.0) {
      const double star = canonical_root(a, b, c);
      if (star >= lo && star <= hi) {
        bool matched = false;
        for (const StationaryPoint& p : out.points)
          if (std::fabs(p.sigma - star) <= 1e-10 * star) matched = true;
        if (!matched)
          throw numeric_error(
              "stationary_points: bracketed roots disagree with the closed form at sigma=" +
              fmt17(star));
      }
    }
  }
  return out;
}

struct CriticalPointReport {
  bool found = false;
  double mu_critical = 0.0;
  double sigma_critical = 0.0;
  std::string diagnostics;
};

struct FamilyScanOptions {
  int mu_samples = 512;        // uniform control-parameter grid
  double mu_rel_width = 1e-10; // bisection stop on the control parameter
  ScanOptions scan{};
};

using ModelFamily = std::function<EnergyModel(double)>;

// Scans a one-parameter family for a change in the number of stationary
// points; bisects any change to locate the fold and reports the degenerate
// width as the midpoint of the closest adjacent root pair on the side that
// still resolves both roots.
inline CriticalPointReport find_degenerate(const ModelFamily& family, double mu_lo,
                                           double mu_hi, double win_lo, double win_hi,
                                           const FamilyScanOptions& opt = {}) {
  if (!(mu_lo < mu_hi)) throw std::invalid_argument("find_degenerate: mu_lo < mu_hi required");
  if (opt.mu_samples < 2) throw std::invalid_argument("find_degenerate: need >= 2 mu samples");

  const auto count_at = [&](double mu) {
    return stationary_points(family(mu), win_lo, win_hi, opt.scan).points.size();
  };

  const int s = opt.mu_samples;
  std::vector<double> mus(s);
  std::vector<std::size_t> counts(s);
  for (int i = 0; i < s; ++i) {
    mus[i] = mu_lo + (mu_hi - mu_lo) * double(i) / double(s - 1);
    counts[i] = count_at(mus[i]);
  }

  int changes = 0;
  int first = -1;
  for (int i = 0; i + 1 < s; ++i)
    if (counts[i] != counts[i + 1]) {
      ++changes;
      if (first < 0) first = i;
    }

  CriticalPointReport rep;
  if (changes == 0) {
    rep.found = false;
    rep.diagnostics = "no count change: " + std::to_string(counts.front()) +
                      " stationary point(s) at mu=" + fmt17(mu_lo) + " and " +
                      std::to_string(counts.back()) + " at mu=" + fmt17(mu_hi) + " across " +
                      std::to_string(s) + " samples";
    return rep;
  }

  double a = mus[first], b = mus[first + 1];
  std::size_t ca = counts[first], cb = counts[first + 1];
  const double mu_scale = std::max({std::fabs(mu_lo), std::fabs(mu_hi), 1e-300});
  while (b - a > opt.mu_rel_width * mu_scale) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const std::size_t cm = count_at(m);
    if (cm == ca) {
      a = m;
    } else {
      b = m;
      cb = cm;
    }
  }
  rep.mu_critical = 0.5 * (a + b);

  // Resolve the merging pair on the side that still has more roots.
  const double mu_many = ca > cb ? a : b;
  const std::vector<StationaryPoint> pts =
      stationary_points(family(mu_many), win_lo, win_hi, opt.scan).points;
  if (pts.size() >= 2 && ca != cb && (ca > cb ? ca - cb : cb - ca) >= 2) {
    rep.found = true;
    double best_gap = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double gap = pts[i + 1].sigma - pts[i].sigma;
      if (i == 0 || gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    rep.sigma_critical = 0.5 * (pts[best].sigma + pts[best + 1].sigma);
    rep.diagnostics = "count " + std::to_string(ca) + " -> " + std::to_string(cb) +
                      " across mu=" + fmt17(rep.mu_critical) +
                      (changes > 1 ? "; " + std::to_string(changes) +
                                         " change intervals total, first reported"
                                   : "");
  } else if (!pts.empty()) {
    // A count step of one means a root crossed the window edge, not a fold.
    rep.found = false;
    const double edge_lo = pts.front().sigma - win_lo;
    const double edge_hi = win_hi - pts.back().sigma;
    rep.sigma_critical = edge_lo < edge_hi ? pts.front().sigma : pts.back().sigma;
    rep.diagnostics = "root count stepped by one at mu=" + fmt17(rep.mu_critical) +
                      "; a root crossed the window edge rather than merging";
  } else {
    rep.found = true;
    rep.sigma_critical = std::sqrt(win_lo * win_hi);
    rep.diagnostics = "count change at mu=" + fmt17(rep.mu_critical) +
                      " but no roots resolved on either side";
  }
  return rep;
}

struct BranchRow {
  double control = 0.0;  // mass (or family parameter)
  int branch_index = 0;  // 0-based rank by sigma_star within one control value
  double sigma_star = 0.0;
  double energy = 0.0;
  double curvature = 0.0;
  Stability stability = Stability::minimum;
};

struct BranchDiagram {
  std::vector<BranchRow> rows;
  std::vector<std::string> warnings;
};

inline BranchDiagram sweep_mass(const PhysicalParams& base, const std::vector<double>& masses,
                                double win_lo, double win_hi, const ScanOptions& opt = {}) {
  BranchDiagram out;
  for (double m : masses) {
    if (!(m > 0.0)) throw std::invalid_argument("sweep_mass: masses must be > 0");
    PhysicalParams p = base;
    p.mass = m;
    StationaryScan scan = stationary_points(canonical_model(p), win_lo, win_hi, opt);
    if (!scan.warning.empty())
      out.warnings.push_back("mass=" + fmt17(m) + ": " + scan.warning);
    for (const StationaryPoint& pt : scan.points)
      out.rows.push_back({m, 0, pt.sigma, pt.energy, pt.curvature, pt.stability});
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const BranchRow& x, const BranchRow& y) {
    if (x.control != y.control) return x.control < y.control;
    return x.sigma_star < y.sigma_star;
  });
  for (std::size_t i = 0; i < out.rows.size(); ++i)
    out.rows[i].branch_index =
        (i > 0 && out.rows[i - 1].control == out.rows[i].control)
            ? out.rows[i - 1].branch_index + 1
            : 0;
  return out;
}

}  // namespace rsn
