#pragma once

// JSON run configuration. Every field has a default, so {} is a complete
// config (natural units, unit mass, unit coupling, canonical model). Unknown
// keys are rejected with the offending field path; type and range violations
// name the field. All failures throw config_error.

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

#include "common.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "model.hpp"

namespace rsn {

struct OutputConfig {
  std::string format = "csv";  // csv | json
  std::string path;            // empty: standard output
};

struct ModelSpec {
  bool canonical = true;
  std::vector<PowerLawTerm> terms;  // used when canonical is false
};

struct ResolvedConfig {
  UnitSystem units = UnitSystem::natural;
  PhysicalParams params;
  double l_reg = 0.0;  // regularization length; 0 when not derivable
  double omega = 1.0;  // internal frequency feeding the damping estimate
  ModelSpec model;
  DynamicsConfig dynamics;
  PDEConfig pde;
  OutputConfig output;

  EnergyModel build_model() const {
    if (model.canonical) return canonical_model(params);
    return EnergyModel(model.terms, "custom");
  }
};

namespace detail {

using nlohmann::json;

inline void check_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw config_error(where + ": expected an object");
}

inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok)
      throw config_error("unknown key \"" + (where.empty() ? item.key()
                                                           : where + "." + item.key()) +
                         "\"");
  }
}

inline double num_field(const json& obj, const std::string& where, const char* key,
                        double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw config_error(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline long long int_field(const json& obj, const std::string& where, const char* key,
                           long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw config_error(where + "." + key + ": expected an integer");
  return v.get<long long>();
}

inline std::string str_field(const json& obj, const std::string& where, const char* key,
                             const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw config_error(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw config_error(field + ": must be > 0");
}

}  // namespace detail

inline Scheme parse_scheme(const std::string& s) {
  if (s == "split_step") return Scheme::split_step;
  if (s == "crank_nicolson") return Scheme::crank_nicolson;
  throw config_error("pde.scheme: expected \"split_step\" or \"crank_nicolson\", got \"" +
                     s + "\"");
}

inline ResolvedConfig resolve_config(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::check_object;
  using detail::int_field;
  using detail::num_field;
  using detail::str_field;

  check_object(j, "config");
  check_keys(j, "", {"units", "constants", "particle", "repulsion", "model", "dynamics",
                     "pde", "output"});

  ResolvedConfig rc;

  const std::string units = str_field(j, "config", "units", "natural");
  if (units == "natural") {
    rc.units = UnitSystem::natural;
    rc.params.constants = natural_constants();
    rc.params.mass = 1.0;
  } else if (units == "si") {
    rc.units = UnitSystem::si;
    rc.params.constants = si_constants();
    rc.params.mass = 1e-17;
  } else {
    throw config_error("units: expected \"natural\" or \"si\", got \"" + units + "\"");
  }
  rc.params.units = rc.units;

  if (j.contains("constants")) {
    const auto& c = j.at("constants");
    check_object(c, "constants");
    check_keys(c, "constants", {"hbar", "G"});
    rc.params.constants.hbar = num_field(c, "constants", "hbar", rc.params.constants.hbar);
    rc.params.constants.G = num_field(c, "constants", "G", rc.params.constants.G);
    detail::require_positive(rc.params.constants.hbar, "constants.hbar");
    if (!(rc.params.constants.G >= 0.0)) throw config_error("constants.G: must be >= 0");
  }

  if (j.contains("particle")) {
    const auto& p = j.at("particle");
    check_object(p, "particle");
    if (rc.units == UnitSystem::natural) {
      check_keys(p, "particle", {"mass"});
      rc.params.mass = num_field(p, "particle", "mass", rc.params.mass);
    } else {
      check_keys(p, "particle", {"mass_kg"});
      rc.params.mass = num_field(p, "particle", "mass_kg", rc.params.mass);
    }
    detail::require_positive(rc.params.mass, "particle.mass");
  }

  // Repulsion: direct coupling or derived from a regularization length.
  double lambda_direct = -1.0, from_length = -1.0;
  if (j.contains("repulsion")) {
    const auto& r = j.at("repulsion");
    check_object(r, "repulsion");
    check_keys(r, "repulsion", {"lambda", "from_length"});
    if (r.contains("lambda") && r.contains("from_length"))
      throw config_error("repulsion: lambda and from_length are mutually exclusive");
    lambda_direct = num_field(r, "repulsion", "lambda", -1.0);
    from_length = num_field(r, "repulsion", "from_length", -1.0);
    if (r.contains("lambda") && !(lambda_direct >= 0.0))
      throw config_error("repulsion.lambda: must be >= 0");
    if (r.contains("from_length")) detail::require_positive(from_length, "repulsion.from_length");
  }
  if (lambda_direct < 0.0 && from_length < 0.0) {
    if (rc.units == UnitSystem::natural)
      lambda_direct = 1.0;
    else
      from_length = 1e-7;
  }
  if (from_length > 0.0) {
    rc.l_reg = from_length;
    rc.params.lambda = lambda_from_length(rc.params, from_length);
  } else {
    rc.params.lambda = lambda_direct;
    const double gm2 = rc.params.constants.G * rc.params.mass * rc.params.mass;
    rc.l_reg = (gm2 > 0.0 && lambda_direct > 0.0) ? std::sqrt(lambda_direct / gm2) : 0.0;
  }

  if (j.contains("model")) {
    const auto& m = j.at("model");
    check_object(m, "model");
    check_keys(m, "model", {"preset", "terms"});
    if (m.contains("preset") && m.contains("terms"))
      throw config_error("model: preset and terms are mutually exclusive");
    if (m.contains("terms")) {
      const auto& ts = m.at("terms");
      if (!ts.is_array() || ts.empty())
        throw config_error("model.terms: expected a non-empty array");
      rc.model.canonical = false;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string where = "model.terms[" + std::to_string(i) + "]";
        check_object(ts[i], where);
        check_keys(ts[i], where, {"coeff", "exponent"});
        if (!ts[i].contains("coeff") || !ts[i].contains("exponent"))
          throw config_error(where + ": requires coeff and exponent");
        rc.model.terms.push_back({num_field(ts[i], where, "coeff", 0.0),
                                  num_field(ts[i], where, "exponent", 0.0)});
      }
    } else {
      const std::string preset = str_field(m, "model", "preset", "canonical");
      if (preset != "canonical")
        throw config_error("model.preset: unknown preset \"" + preset + "\"");
    }
  }

  {
    const nlohmann::json empty = nlohmann::json::object();
    const auto& d = j.contains("dynamics") ? j.at("dynamics") : empty;
    check_object(d, "dynamics");
    check_keys(d, "dynamics",
               {"m_eff", "gamma", "big_gamma", "dt", "t_end", "rel_tol", "abs_tol",
                "sigma_floor", "sigma_ceiling", "omega"});
    rc.omega = num_field(d, "dynamics", "omega", 1.0);
    detail::require_positive(rc.omega, "dynamics.omega");
    DynamicsConfig& dc = rc.dynamics;
    dc.m_eff = num_field(d, "dynamics", "m_eff", 1.5 * rc.params.mass);
    dc.gamma = num_field(d, "dynamics", "gamma", rc.params.mass * rc.omega);
    dc.big_gamma = num_field(d, "dynamics", "big_gamma",
                             dc.gamma > 0.0 ? 1.0 / dc.gamma : 1.0);
    dc.dt = num_field(d, "dynamics", "dt", dc.dt);
    dc.t_end = num_field(d, "dynamics", "t_end", dc.t_end);
    dc.rel_tol = num_field(d, "dynamics", "rel_tol", dc.rel_tol);
    dc.abs_tol = num_field(d, "dynamics", "abs_tol", dc.abs_tol);
    dc.sigma_floor = num_field(d, "dynamics", "sigma_floor", dc.sigma_floor);
    dc.sigma_ceiling = num_field(d, "dynamics", "sigma_ceiling", dc.sigma_ceiling);
    detail::require_positive(dc.m_eff, "dynamics.m_eff");
    if (!(dc.gamma >= 0.0)) throw config_error("dynamics.gamma: must be >= 0");
    detail::require_positive(dc.big_gamma, "dynamics.big_gamma");
    detail::require_positive(dc.dt, "dynamics.dt");
    detail::require_positive(dc.t_end, "dynamics.t_end");
    detail::require_positive(dc.rel_tol, "dynamics.rel_tol");
    detail::require_positive(dc.abs_tol, "dynamics.abs_tol");
    detail::require_positive(dc.sigma_floor, "dynamics.sigma_floor");
    if (!(dc.sigma_ceiling > dc.sigma_floor))
      throw config_error("dynamics.sigma_ceiling: must exceed sigma_floor");
  }

  {
    const nlohmann::json empty = nlohmann::json::object();
    const auto& p = j.contains("pde") ? j.at("pde") : empty;
    check_object(p, "pde");
    check_keys(p, "pde",
               {"n", "r_max", "dt", "max_steps", "energy_tol", "scheme", "sigma0", "stride"});
    PDEConfig& pc = rc.pde;
    const long long n = int_field(p, "pde", "n", pc.n);
    if (n < 64 || n % 2 != 0)
      throw config_error("pde.n: must be even and at least 64");
    pc.n = static_cast<int>(n);
    pc.r_max = num_field(p, "pde", "r_max", pc.r_max);
    if (p.contains("r_max")) detail::require_positive(pc.r_max, "pde.r_max");
    pc.dt = num_field(p, "pde", "dt", pc.dt);
    if (p.contains("dt")) detail::require_positive(pc.dt, "pde.dt");
    pc.max_steps = int_field(p, "pde", "max_steps", pc.max_steps);
    if (pc.max_steps < 1) throw config_error("pde.max_steps: must be >= 1");
    pc.energy_tol = num_field(p, "pde", "energy_tol", pc.energy_tol);
    detail::require_positive(pc.energy_tol, "pde.energy_tol");
    pc.scheme = parse_scheme(str_field(p, "pde", "scheme", to_string(pc.scheme)));
    pc.sigma0 = num_field(p, "pde", "sigma0", pc.sigma0);
    detail::require_positive(pc.sigma0, "pde.sigma0");
    pc.stride = int_field(p, "pde", "stride", pc.stride);
    if (pc.stride < 1) throw config_error("pde.stride: must be >= 1");
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    check_object(o, "output");
    check_keys(o, "output", {"format", "path"});
    rc.output.format = str_field(o, "output", "format", rc.output.format);
    rc.output.path = str_field(o, "output", "path", rc.output.path);
    if (rc.output.format != "csv" && rc.output.format != "json")
      throw config_error("output.format: expected \"csv\" or \"json\", got \"" +
                         rc.output.format + "\"");
  }

  rc.pde.params = rc.params;
  return rc;
}

inline ResolvedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("config parse failure: ") + e.what());
  }
  return resolve_config(j);
}

}  // namespace rsn
