// Command-line surface over the collapse-model library. Every subcommand is
// deterministic: identical config and argv produce byte-identical output.
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 configuration error.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rsn/rsn.hpp"

namespace {

using namespace rsn;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration");
  cmd->add_option("--out", c.out_path, "output path (default: standard output)");
  cmd->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

ResolvedConfig load_common(const CommonOpts& c) {
  ResolvedConfig rc = c.config_path.empty() ? resolve_config(nlohmann::json::object())
                                            : load_config(c.config_path);
  if (!c.format.empty()) rc.output.format = c.format;
  if (!c.out_path.empty()) rc.output.path = c.out_path;
  return rc;
}

void emit(const ResolvedConfig& rc, const Table& t) {
  const std::string body = rc.output.format == "json" ? to_json(t) : to_csv(t);
  if (rc.output.path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(rc.output.path, std::ios::binary);
  if (!out) throw config_error("cannot open output path: " + rc.output.path);
  out << body;
}

void emit_text(const ResolvedConfig& rc, const std::string& body) {
  if (rc.output.path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(rc.output.path, std::ios::binary);
  if (!out) throw config_error("cannot open output path: " + rc.output.path);
  out << body;
}

Table trajectory_table(const Trajectory& tr) {
  Table t;
  t.header = {"t", "sigma", "sigma_dot", "energy", "grad"};
  for (const auto& s : tr.samples)
    t.rows.push_back({s.t, s.sigma, s.sigma_dot, s.energy, s.grad});
  return t;
}

Table observables_table(const std::vector<FieldObservables>& series) {
  Table t;
  t.header = {"t", "norm", "sigma_eff", "T", "e_grav", "e_rep", "e_total"};
  for (const auto& o : series)
    t.rows.push_back({o.t, o.norm, o.sigma_eff, o.kinetic, o.e_grav, o.e_rep, o.e_total});
  return t;
}

void dump_state(const std::string& path, const RadialState& s) {
  Table t;
  t.header = {"r", "re_u", "im_u"};
  for (int i = 0; i <= s.grid.n; ++i)
    t.rows.push_back({s.grid.r(i), s.u[i].real(), s.u[i].imag()});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output path: " + path);
  out << to_csv(t);
}

void trajectory_side_channel(const Trajectory& tr) {
  std::cerr << "{\"terminal\":\"" << to_string(tr.terminal)
            << "\",\"t_final\":" << fmt17(tr.t_final)
            << ",\"sigma_final\":" << fmt17(tr.sigma_final)
            << ",\"samples\":" << tr.samples.size() << "}\n";
}

std::vector<double> parse_mass_list(const std::string& arg) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= arg.size()) {
    const std::size_t comma = arg.find(',', pos);
    const std::string tok = arg.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw config_error("--masses: cannot parse \"" + tok + "\"");
    }
    if (used != tok.size()) throw config_error("--masses: cannot parse \"" + tok + "\"");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> parse_mass_range(const std::string& arg) {
  double lo = 0.0, hi = 0.0;
  long long count = 0;
  if (std::sscanf(arg.c_str(), "%lf:%lf:%lld", &lo, &hi, &count) != 3)
    throw config_error("--mass-range: expected lo:hi:count, got \"" + arg + "\"");
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw config_error("--mass-range: requires 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (long long i = 0; i < count; ++i)
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

int cmd_landscape(const CommonOpts& common, double at, bool has_at, bool stationary,
                  double sig_lo, double sig_hi, long long samples) {
  const ResolvedConfig rc = load_common(common);
  const EnergyModel model = rc.build_model();
  if (stationary) {
    const StationaryScan scan = stationary_points(model, sig_lo, sig_hi);
    if (!scan.warning.empty()) std::cerr << "warning: " << scan.warning << '\n';
    Table t;
    t.header = {"sigma", "energy", "curvature", "stability"};
    for (const auto& p : scan.points)
      t.rows.push_back({p.sigma, p.energy, p.curvature, std::string(to_string(p.stability))});
    emit(rc, t);
    return 0;
  }
  Table t;
  t.header = {"sigma", "energy", "grad", "curvature"};
  if (has_at) {
    const LandscapeSample s = evaluate(model, at);
    t.rows.push_back({s.sigma, s.energy, s.grad, s.curvature});
  } else {
    if (!(sig_lo > 0.0) || !(sig_hi > sig_lo))
      throw config_error("landscape: requires 0 < sigma-min < sigma-max");
    if (samples < 2) throw config_error("landscape: --samples must be >= 2");
    for (long long i = 0; i < samples; ++i) {
      const double sigma =
          sig_lo * std::pow(sig_hi / sig_lo, static_cast<double>(i) / (samples - 1));
      const LandscapeSample s = evaluate(model, sigma);
      t.rows.push_back({s.sigma, s.energy, s.grad, s.curvature});
    }
  }
  emit(rc, t);
  return 0;
}

int cmd_sweep(const CommonOpts& common, const std::string& mass_range,
              const std::string& masses, const std::string& window) {
  const ResolvedConfig rc = load_common(common);
  const std::vector<double> ms =
      masses.empty() ? parse_mass_range(mass_range) : parse_mass_list(masses);
  double win_lo = 0.0, win_hi = 0.0;
  if (!window.empty()) {
    if (std::sscanf(window.c_str(), "%lf:%lf", &win_lo, &win_hi) != 2 ||
        !(win_lo > 0.0) || !(win_hi > win_lo))
      throw config_error("--window: expected lo:hi with 0 < lo < hi");
  } else {
    // Default window brackets the closed-form widths by a factor of ten.
    double lo = 0.0, hi = 0.0;
    for (double m : ms) {
      PhysicalParams p = rc.params;
      p.mass = m;
      const CanonicalCoefficients k = canonical_coefficients(p);
      const double star = canonical_root(k.a, k.b, k.c);
      lo = lo == 0.0 ? star : std::min(lo, star);
      hi = std::max(hi, star);
    }
    win_lo = lo / 10.0;
    win_hi = hi * 10.0;
  }
  const BranchDiagram diag = sweep_mass(rc.params, ms, win_lo, win_hi);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << '\n';
  Table t;
  t.header = {"control", "branch_index", "sigma_star", "energy", "curvature", "stability"};
  for (const auto& r : diag.rows)
    t.rows.push_back({r.control, static_cast<long long>(r.branch_index), r.sigma_star,
                      r.energy, r.curvature, std::string(to_string(r.stability))});
  emit(rc, t);
  return 0;
}

int cmd_evolve(const CommonOpts& common, const std::string& mode, double sigma0,
               double sigma_dot0) {
  const ResolvedConfig rc = load_common(common);
  const EnergyModel model = rc.build_model();
  Trajectory tr;
  if (mode == "damped")
    tr = evolve_damped(model, rc.dynamics, sigma0, sigma_dot0);
  else if (mode == "overdamped")
    tr = evolve_overdamped(model, rc.dynamics.big_gamma, sigma0, rc.dynamics);
  else
    throw config_error("--mode: expected damped or overdamped, got \"" + mode + "\"");
  emit(rc, trajectory_table(tr));
  trajectory_side_channel(tr);
  return 0;
}

int cmd_basin(const CommonOpts& common, const std::vector<double>& pair) {
  const ResolvedConfig rc = load_common(common);
  const EnergyModel model = rc.build_model();
  const BasinReport rep =
      basin_experiment(model, rc.dynamics.big_gamma, pair[0], pair[1], rc.dynamics);
  Table t;
  t.header = {"sigma_a", "sigma_b", "fate_a", "fate_b",
              "sigma_final_a", "sigma_final_b", "separated"};
  t.rows.push_back({rep.sigma_a, rep.sigma_b, std::string(to_string(rep.fate_a)),
                    std::string(to_string(rep.fate_b)), rep.sigma_final_a,
                    rep.sigma_final_b, static_cast<long long>(rep.separated ? 1 : 0)});
  emit(rc, t);
  return 0;
}

int cmd_pde_ground(const CommonOpts& common, const std::string& state_out) {
  const ResolvedConfig rc = load_common(common);
  const GroundState gs = ground_state(rc.pde);
  emit(rc, observables_table({gs.observables}));
  if (!state_out.empty()) dump_state(state_out, gs.state);
  std::cerr << "{\"sweeps\":" << gs.sweeps
            << ",\"e_total\":" << fmt17(gs.observables.e_total) << "}\n";
  return 0;
}

int cmd_pde_evolve(const CommonOpts& common, double t_end, const std::string& state_out) {
  const ResolvedConfig rc = load_common(common);
  const RadialState initial = gaussian_state(resolve_grid(rc.pde), rc.pde.sigma0);
  const FieldEvolution ev = evolve_field(initial, rc.pde, t_end);
  emit(rc, observables_table(ev.series));
  if (!state_out.empty()) dump_state(state_out, ev.state);
  return 0;
}

int cmd_estimate(const CommonOpts& common, double prefactor) {
  const ResolvedConfig rc = load_common(common);
  if (!(prefactor > 0.0)) throw config_error("--prefactor: must be > 0");
  if (!(rc.l_reg > 0.0))
    throw config_error(
        "estimate: no regularization length; set repulsion.from_length or a positive "
        "repulsion.lambda");
  PhysicalParams p = rc.params;
  p.lambda = prefactor * lambda_from_length(p, rc.l_reg);
  const double m_c = critical_mass_estimate(p.constants, rc.l_reg);
  const CanonicalCoefficients k = canonical_coefficients(p);
  const double star = canonical_root(k.a, k.b, k.c);
  const double curvature = canonical_model(p).curvature(star);
  const double big_gamma = gamma_estimate(p, rc.omega);
  const double tau = collapse_timescale(big_gamma, curvature).tau;
  Table t;
  t.header = {"name", "value"};
  t.rows.push_back({std::string("lambda"), p.lambda});
  t.rows.push_back({std::string("l_reg"), rc.l_reg});
  t.rows.push_back({std::string("m_c"), m_c});
  t.rows.push_back({std::string("sigma_star"), star});
  t.rows.push_back({std::string("curvature_at_star"), curvature});
  t.rows.push_back({std::string("big_gamma"), big_gamma});
  t.rows.push_back({std::string("tau"), tau});
  emit(rc, t);
  return 0;
}

int cmd_audit(const CommonOpts& common) {
  const ResolvedConfig rc = load_common(common);
  const AuditReport rep = run_audit();
  Table t;
  t.header = {"version", "claim_id", "source_location", "source_value",
              "computed_value", "verdict", "note"};
  for (const auto& c : rep.claims)
    t.rows.push_back({std::string(rep.version), c.claim_id, c.source_location,
                      c.source_value, c.computed_value, std::string(to_string(c.verdict)),
                      c.note});
  if (rc.output.format == "json") {
    Table claims;
    claims.header = {"claim_id", "source_location", "source_value", "computed_value",
                     "verdict", "note"};
    for (const auto& c : rep.claims)
      claims.rows.push_back({c.claim_id, c.source_location, c.source_value,
                             c.computed_value, std::string(to_string(c.verdict)), c.note});
    std::string arr = to_json(claims);
    if (!arr.empty() && arr.back() == '\n') arr.pop_back();
    std::string body = "{\"version\":\"" + rep.version +
                       "\",\"constants\":{\"hbar\":" + fmt17(rep.constants.hbar) +
                       ",\"G\":" + fmt17(rep.constants.G) + "},\"claims\":" + arr + "}\n";
    emit_text(rc, body);
  } else {
    emit(rc, t);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collapse-model toolkit: reduced energy landscape, width dynamics, "
               "radial field solver, and estimate auditing"};
  app.require_subcommand(1);
  int rc_code = 0;

  CommonOpts c_land;
  double land_at = 0.0, land_lo = 0.1, land_hi = 10.0;
  long long land_samples = 256;
  bool land_stationary = false;
  auto* land = app.add_subcommand("landscape", "Sample the energy landscape or list its "
                                               "stationary points");
  add_common(land, c_land);
  auto* at_opt = land->add_option("--at", land_at, "evaluate at a single width");
  land->add_flag("--stationary", land_stationary, "locate and classify stationary points");
  land->add_option("--sigma-min", land_lo, "lower width bound")->capture_default_str();
  land->add_option("--sigma-max", land_hi, "upper width bound")->capture_default_str();
  land->add_option("--samples", land_samples, "sample count")->capture_default_str();
  land->callback([&]() {
    rc_code = cmd_landscape(c_land, land_at, at_opt->count() > 0, land_stationary, land_lo,
                            land_hi, land_samples);
  });

  CommonOpts c_sweep;
  std::string sweep_range = "0.1:10:16", sweep_masses, sweep_window;
  auto* sweep = app.add_subcommand("sweep", "Branch diagram of stationary widths vs mass");
  add_common(sweep, c_sweep);
  sweep->add_option("--mass-range", sweep_range, "lo:hi:count, log-spaced")
      ->capture_default_str();
  sweep->add_option("--masses", sweep_masses, "comma-separated mass list");
  sweep->add_option("--window", sweep_window, "width window lo:hi");
  sweep->callback(
      [&]() { rc_code = cmd_sweep(c_sweep, sweep_range, sweep_masses, sweep_window); });

  CommonOpts c_evolve;
  std::string evolve_mode = "damped";
  double evolve_sigma0 = 10.0, evolve_sigma_dot0 = 0.0;
  auto* evolve = app.add_subcommand("evolve", "Integrate the reduced width dynamics");
  add_common(evolve, c_evolve);
  evolve->add_option("--mode", evolve_mode, "damped or overdamped")
      ->check(CLI::IsMember({"damped", "overdamped"}))
      ->capture_default_str();
  evolve->add_option("--sigma0", evolve_sigma0, "initial width")->capture_default_str();
  evolve->add_option("--sigma-dot0", evolve_sigma_dot0, "initial width velocity")
      ->capture_default_str();
  evolve->callback(
      [&]() { rc_code = cmd_evolve(c_evolve, evolve_mode, evolve_sigma0, evolve_sigma_dot0); });

  CommonOpts c_basin;
  std::vector<double> basin_pair;
  auto* basin = app.add_subcommand("basin", "Compare the fates of two initial widths");
  add_common(basin, c_basin);
  basin->add_option("--pair", basin_pair, "two initial widths")->expected(2)->required();
  basin->callback([&]() { rc_code = cmd_basin(c_basin, basin_pair); });

  CommonOpts c_ground;
  std::string ground_state_out;
  auto* ground = app.add_subcommand("pde-ground", "Relax the radial field to its ground "
                                                  "state");
  add_common(ground, c_ground);
  ground->add_option("--state-out", ground_state_out, "write final state CSV (r,re_u,im_u)");
  ground->callback([&]() { rc_code = cmd_pde_ground(c_ground, ground_state_out); });

  CommonOpts c_pevolve;
  std::string pevolve_state_out;
  double pevolve_t_end = 1.0;
  auto* pevolve = app.add_subcommand("pde-evolve", "Propagate the radial field in real time");
  add_common(pevolve, c_pevolve);
  pevolve->add_option("--t-end", pevolve_t_end, "propagation horizon")->capture_default_str();
  pevolve->add_option("--state-out", pevolve_state_out,
                      "write final state CSV (r,re_u,im_u)");
  pevolve->callback(
      [&]() { rc_code = cmd_pde_evolve(c_pevolve, pevolve_t_end, pevolve_state_out); });

  CommonOpts c_estimate;
  double estimate_prefactor = 1.0;
  auto* estimate = app.add_subcommand(
      "estimate", "Coupling, critical mass, damping, and timescale estimates");
  add_common(estimate, c_estimate);
  estimate->add_option("--prefactor", estimate_prefactor,
                       "order-one factor applied to the coupling balance")
      ->capture_default_str();
  estimate->callback([&]() { rc_code = cmd_estimate(c_estimate, estimate_prefactor); });

  CommonOpts c_audit;
  auto* audit_cmd = app.add_subcommand("audit", "Recompute and classify the recorded "
                                                "order-of-magnitude claims");
  add_common(audit_cmd, c_audit);
  audit_cmd->callback([&]() { rc_code = cmd_audit(c_audit); });

  try {
    app.parse(argc, argv);
    return rc_code;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
