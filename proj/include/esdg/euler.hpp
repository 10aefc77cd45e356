#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace esdg {

struct GasModel {
  double gamma = 1.4;  // ideal gas, gamma > 1
};

/// Conserved variables (density, momentum, total energy) at one node.
struct ConservedState {
  double rho = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double E = 0.0;
};

struct PrimitiveState {
  double rho = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double p = 0.0;
};

struct EntropyVars {
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 0.0;
  double w4 = 0.0;  // equals -rho/p, negative on admissible states
};

/// Positivity floors defining the admissible set {rho >= rho_min, p >= p_min}.
struct AdmissibleBounds {
  double rho_min = 1e-6;
  double p_min = 1e-6;
};

using Mat4 = std::array<std::array<double, 4>, 4>;

inline double pressure(const ConservedState& u, const GasModel& gas) {
  if (!(u.rho > 0.0)) throw std::domain_error("pressure: nonpositive density");
  return (gas.gamma - 1.0) * (u.E - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
}

inline PrimitiveState to_primitive(const ConservedState& u, const GasModel& gas) {
  if (!(u.rho > 0.0)) throw std::domain_error("to_primitive: nonpositive density");
  const double inv_rho = 1.0 / u.rho;
  return {u.rho, u.m1 * inv_rho, u.m2 * inv_rho, pressure(u, gas)};
}

inline ConservedState to_conserved(const PrimitiveState& q, const GasModel& gas) {
  return {q.rho, q.rho * q.u1, q.rho * q.u2,
          q.p / (gas.gamma - 1.0) + 0.5 * q.rho * (q.u1 * q.u1 + q.u2 * q.u2)};
}

/// Thermodynamic entropy s = log(p / rho^gamma).
inline double thermodynamic_entropy(const ConservedState& u, const GasModel& gas) {
  const double p = pressure(u, gas);
  if (!(p > 0.0)) throw std::domain_error("thermodynamic_entropy: nonpositive pressure");
  return std::log(p) - gas.gamma * std::log(u.rho);
}

/// Mathematical entropy eta = -rho s / (gamma - 1), convex on admissible states.
inline double math_entropy(const ConservedState& u, const GasModel& gas) {
  return -u.rho * thermodynamic_entropy(u, gas) / (gas.gamma - 1.0);
}

inline EntropyVars entropy_variables(const ConservedState& u, const GasModel& gas) {
  const double p = pressure(u, gas);
  if (!(p > 0.0)) throw std::domain_error("entropy_variables: nonpositive pressure");
  const double s = std::log(p) - gas.gamma * std::log(u.rho);
  const double gm1 = gas.gamma - 1.0;
  const double usq = (u.m1 * u.m1 + u.m2 * u.m2) / (u.rho * u.rho);
  return {gas.gamma / gm1 - s / gm1 - 0.5 * u.rho * usq / p,
          u.m1 / p, u.m2 / p, -u.rho / p};
}

/// Entropy potential psi = rho u = m, componentwise per direction.
inline std::array<double, 2> entropy_potential(const ConservedState& u) {
  if (!(u.rho > 0.0)) throw std::domain_error("entropy_potential: nonpositive density");
  return {u.m1, u.m2};
}

/// Entropy flux g = eta * u.
inline std::array<double, 2> entropy_flux(const ConservedState& u, const GasModel& gas) {
  const double eta = math_entropy(u, gas);
  return {eta * u.m1 / u.rho, eta * u.m2 / u.rho};
}

inline double sound_speed(const ConservedState& u, const GasModel& gas) {
  const double p = pressure(u, gas);
  if (!(p > 0.0)) throw std::domain_error("sound_speed: nonpositive pressure");
  return std::sqrt(gas.gamma * p / u.rho);
}

/// max(|u_a| + c_a, |u_b| + c_b); the LLF dissipation coefficient and the
/// CFL speed both come from here.
inline double max_wave_speed(const ConservedState& ua, const ConservedState& ub,
                             const GasModel& gas) {
  const double sa = std::hypot(ua.m1 / ua.rho, ua.m2 / ua.rho) + sound_speed(ua, gas);
  const double sb = std::hypot(ub.m1 / ub.rho, ub.m2 / ub.rho) + sound_speed(ub, gas);
  return std::max(sa, sb);
}

/// Hessian of the mathematical entropy with respect to the conserved
/// variables: (rho (gamma-1) / p^2) * H, symmetric positive definite on
/// admissible states. H(3,3) of the unscaled block equals one.
inline Mat4 entropy_hessian(const ConservedState& u, const GasModel& gas) {
  const double p = pressure(u, gas);
  if (!(p > 0.0)) throw std::domain_error("entropy_hessian: nonpositive pressure");
  const double g = gas.gamma;
  const double gm1 = g - 1.0;
  const double rho = u.rho, m1 = u.m1, m2 = u.m2;
  const double msq = m1 * m1 + m2 * m2;
  const double r2 = rho * rho;
  const double q = msq / r2;                // |u|^2
  const double pr = p / (rho * gm1);

  Mat4 h{};
  h[0][0] = 0.25 * q * q + g / (gm1 * gm1) * p * p / r2;
  h[0][1] = h[1][0] = -m1 * msq / (2.0 * r2 * rho);
  h[0][2] = h[2][0] = -m2 * msq / (2.0 * r2 * rho);
  h[0][3] = h[3][0] = 0.5 * q - pr;
  h[1][1] = m1 * m1 / r2 + pr;
  h[1][2] = h[2][1] = m1 * m2 / r2;
  h[1][3] = h[3][1] = -m1 / rho;
  h[2][2] = m2 * m2 / r2 + pr;
  h[2][3] = h[3][2] = -m2 / rho;
  h[3][3] = 1.0;

  const double factor = rho * gm1 / (p * p);
  for (auto& row : h)
    for (auto& v : row) v *= factor;
  return h;
}

inline bool is_admissible(const ConservedState& u, const AdmissibleBounds& bounds,
                          const GasModel& gas) {
  if (!(u.rho >= bounds.rho_min)) return false;
  const double p = (gas.gamma - 1.0) * (u.E - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
  return p >= bounds.p_min;
}

}  // namespace esdg
