#pragma once

// Physical parameters, unit conventions, the canonical reduced energy model
// E(sigma) = a/sigma^2 - b/sigma + c/sigma^3, its dimensionless rescaling,
// and the order-of-magnitude estimators built on it.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "common.hpp"

namespace rsn {

inline constexpr double codata_hbar = 1.054571817e-34;  // J s
inline constexpr double codata_G = 6.67430e-11;         // m^3 kg^-1 s^-2

struct Constants {
  double hbar = 1.0;
  double G = 1.0;
};

inline Constants natural_constants() { return Constants{1.0, 1.0}; }
inline Constants si_constants() { return Constants{codata_hbar, codata_G}; }

enum class UnitSystem { natural, si };

inline const char* to_string(UnitSystem u) {
  return u == UnitSystem::natural ? "natural" : "si";
}

// mass: kg in SI, particle-mass ratio in natural units.
// lambda: repulsive coupling, J m^3 in SI.
struct PhysicalParams {
  double mass = 1.0;
  double lambda = 1.0;
  Constants constants{};
  UnitSystem units = UnitSystem::natural;
};

inline void validate(const Constants& c) {
  if (!(c.hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
  if (!(c.G >= 0.0)) throw std::invalid_argument("G must be >= 0");
}

inline void validate(const PhysicalParams& p) {
  validate(p.constants);
  if (!(p.mass > 0.0)) throw std::invalid_argument("mass must be > 0");
  if (!(p.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

// One signed power-law term: coeff * sigma^exponent.
struct PowerLawTerm {
  double coeff = 0.0;
  double exponent = 0.0;
};

// A sum of power-law terms in the width sigma. Terms are merged by exponent
// and stored sorted, so equality of term lists is canonical.
class EnergyModel {
 public:
  explicit EnergyModel(std::vector<PowerLawTerm> terms, std::string label = "")
      : label_(std::move(label)) {
    if (terms.empty()) throw std::invalid_argument("EnergyModel: no terms");
    std::sort(terms.begin(), terms.end(),
              [](const PowerLawTerm& x, const PowerLawTerm& y) {
                return x.exponent < y.exponent;
              });
    for (const PowerLawTerm& t : terms) {
      if (!std::isfinite(t.coeff) || !std::isfinite(t.exponent))
        throw std::invalid_argument("EnergyModel: non-finite term");
      if (!terms_.empty() && terms_.back().exponent == t.exponent)
        terms_.back().coeff += t.coeff;
      else
        terms_.push_back(t);
    }
  }

  double energy(double sigma) const {
    check_sigma(sigma);
    double e = 0.0;
    for (const PowerLawTerm& t : terms_) e += t.coeff * std::pow(sigma, t.exponent);
    return e;
  }

  double grad(double sigma) const {
    check_sigma(sigma);
    double g = 0.0;
    for (const PowerLawTerm& t : terms_)
      g += t.coeff * t.exponent * std::pow(sigma, t.exponent - 1.0);
    return g;
  }

  double curvature(double sigma) const {
    check_sigma(sigma);
    double k = 0.0;
    for (const PowerLawTerm& t : terms_)
      k += t.coeff * t.exponent * (t.exponent - 1.0) * std::pow(sigma, t.exponent - 2.0);
    return k;
  }

  // Sum of unsigned term magnitudes of E' and E''; natural scales for
  // root certification and degeneracy classification.
  double grad_scale(double sigma) const {
    check_sigma(sigma);
    double s = 0.0;
    for (const PowerLawTerm& t : terms_)
      s += std::fabs(t.coeff * t.exponent) * std::pow(sigma, t.exponent - 1.0);
    return s;
  }

  double curvature_scale(double sigma) const {
    check_sigma(sigma);
    double s = 0.0;
    for (const PowerLawTerm& t : terms_)
      s += std::fabs(t.coeff * t.exponent * (t.exponent - 1.0)) *
           std::pow(sigma, t.exponent - 2.0);
    return s;
  }

  const std::vector<PowerLawTerm>& terms() const { return terms_; }
  const std::string& label() const { return label_; }

 private:
  static void check_sigma(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  }

  std::vector<PowerLawTerm> terms_;
  std::string label_;
};

// Canonical coefficients. With lambda = 0 the sigma^-3 term is omitted.
//   a = 3 hbar^2 / (4 m)
//   b = G m^2 / sqrt(2 pi)
//   c = lambda / (2 pi)^(3/2)
struct CanonicalCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline CanonicalCoefficients canonical_coefficients(const PhysicalParams& p) {
  validate(p);
  const double two_pi = 2.0 * std::numbers::pi;
  CanonicalCoefficients k;
  k.a = 3.0 * p.constants.hbar * p.constants.hbar / (4.0 * p.mass);
  k.b = p.constants.G * p.mass * p.mass / std::sqrt(two_pi);
  k.c = p.lambda / (two_pi * std::sqrt(two_pi));
  return k;
}

inline EnergyModel canonical_model(const PhysicalParams& p) {
  const CanonicalCoefficients k = canonical_coefficients(p);
  std::vector<PowerLawTerm> terms{{k.a, -2.0}, {-k.b, -1.0}};
  if (p.lambda > 0.0) terms.push_back({k.c, -3.0});
  return EnergyModel(std::move(terms), "canonical");
}

// Coupling fixed by the length at which repulsion balances self-gravity:
// lambda = G m^2 l_reg^2 (tilde relation taken with coefficient exactly 1).
inline double lambda_from_length(const PhysicalParams& p, double l_reg) {
  validate(p);
  if (!(l_reg > 0.0)) throw std::invalid_argument("l_reg must be > 0");
  return p.constants.G * p.mass * p.mass * l_reg * l_reg;
}

// m_c = (hbar^2 / (G l_reg))^(1/3), the dimensionally consistent form.
inline double critical_mass_estimate(const Constants& c, double l_reg) {
  validate(c);
  if (!(c.G > 0.0)) throw std::invalid_argument("critical_mass_estimate: G must be > 0");
  if (!(l_reg > 0.0)) throw std::invalid_argument("l_reg must be > 0");
  return std::cbrt(c.hbar * c.hbar / (c.G * l_reg));
}

// Rescaled landscape: sigma = sigma0 * s, E(sigma0 * s) = e0 * Etilde(s),
// Etilde(s) = A/s^2 - B/s + C/s^3 with A = 3/4 and B = 1/sqrt(2 pi)
// independent of all parameters.
struct DimensionlessModel {
  double sigma0 = 0.0;  // hbar^2 / (G m^3)
  double e0 = 0.0;      // hbar^2 / (m sigma0^2)
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;

  EnergyModel rescaled_model() const {
    std::vector<PowerLawTerm> terms{{A, -2.0}, {-B, -1.0}};
    if (C > 0.0) terms.push_back({C, -3.0});
    return EnergyModel(std::move(terms), "canonical-rescaled");
  }
};

inline DimensionlessModel to_dimensionless(const EnergyModel& model,
                                           const PhysicalParams& p) {
  validate(p);
  double a = 0.0, b = 0.0, c = 0.0;
  for (const PowerLawTerm& t : model.terms()) {
    if (t.exponent == -2.0)
      a = t.coeff;
    else if (t.exponent == -1.0)
      b = -t.coeff;
    else if (t.exponent == -3.0)
      c = t.coeff;
    else
      throw std::invalid_argument(
          "to_dimensionless: rescaling is defined only for exponents -3, -2, -1");
  }
  if (!(a > 0.0) || !(b > 0.0) || !(c >= 0.0))
    throw std::invalid_argument("to_dimensionless: model is not canonical-shaped");
  if (!(p.constants.G > 0.0))
    throw std::invalid_argument("to_dimensionless: G must be > 0");

  const double hbar2 = p.constants.hbar * p.constants.hbar;
  DimensionlessModel d;
  d.sigma0 = hbar2 / (p.constants.G * p.mass * p.mass * p.mass);
  d.e0 = hbar2 / (p.mass * d.sigma0 * d.sigma0);
  d.A = a * p.mass / hbar2;
  d.B = b * p.mass * d.sigma0 / hbar2;
  d.C = c * p.mass / (hbar2 * d.sigma0);
  return d;
}

}  // namespace rsn
