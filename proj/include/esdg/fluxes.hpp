#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "esdg/euler.hpp"

namespace esdg {

/// Flux values of the four conserved components for one coordinate direction.
using FluxVector = std::array<double, 4>;

enum class VolumeFlux { Ranocha, Chandrashekar };
enum class SurfaceFlux { LocalLaxFriedrichs, Ranocha };

/// Ranocha as surface flux carries no dissipation; it is only meant for
/// entropy-conservation diagnostics, not production runs.
struct FluxChoice {
  VolumeFlux volume_flux = VolumeFlux::Ranocha;
  SurfaceFlux surface_flux = SurfaceFlux::LocalLaxFriedrichs;
};

/// Axis-aligned unit normal, +-e1 or +-e2.
struct AxisNormal {
  int axis = 1;  // 1 or 2
  int sign = 1;  // +1 or -1
};

/// Per-node quantities precomputed once so that the two-point fluxes in the
/// inner loops need no divisions, logs or square roots of their own.
struct FluxPrim {
  double rho, u1, u2, p, E;
  double log_rho;     // log(rho)
  double log_rho_p;   // log(rho / p)
  double lam;         // |u| + c
};

inline FluxPrim make_flux_prim(const ConservedState& u, const GasModel& gas) {
  if (!(u.rho > 0.0)) throw std::domain_error("make_flux_prim: nonpositive density");
  const double inv_rho = 1.0 / u.rho;
  const double u1 = u.m1 * inv_rho, u2 = u.m2 * inv_rho;
  const double p = (gas.gamma - 1.0) * (u.E - 0.5 * (u.m1 * u1 + u.m2 * u2));
  if (!(p > 0.0)) throw std::domain_error("make_flux_prim: nonpositive pressure");
  const double log_rho = std::log(u.rho);
  const double log_p = std::log(p);
  return {u.rho, u1, u2, p, u.E, log_rho, log_rho - log_p,
          std::sqrt(u1 * u1 + u2 * u2) + std::sqrt(gas.gamma * p * inv_rho)};
}

/// Logarithmic mean (a - b) / (log a - log b), continuous at a == b. Near
/// a == b the quotient is evaluated by the series in z = ((a-b)/(a+b))^2 to
/// keep full precision.
inline double log_mean_impl(double a, double b, double log_a, double log_b) {
  const double diff = a - b;
  const double sum = a + b;
  const double f = diff / sum;
  const double z = f * f;
  if (z < 1e-4) return sum / (2.0 + z * (2.0 / 3.0 + z * (2.0 / 5.0 + z * (2.0 / 7.0))));
  return diff / (log_a - log_b);
}

inline double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("log_mean: nonpositive input");
  return log_mean_impl(a, b, std::log(a), std::log(b));
}

/// Physical Euler flux f_m(U), m = 1 or 2.
inline FluxVector physical_flux(const FluxPrim& q, int direction) {
  const double un = direction == 1 ? q.u1 : q.u2;
  const double mn = q.rho * un;
  FluxVector f{mn, mn * q.u1, mn * q.u2, un * (q.E + q.p)};
  if (direction == 1)
    f[1] += q.p;
  else
    f[2] += q.p;
  return f;
}

inline FluxVector physical_flux(const ConservedState& u, int direction, const GasModel& gas) {
  return physical_flux(make_flux_prim(u, gas), direction);
}

/// Entropy-conservative, kinetic-energy-preserving two-point volume flux
/// (Ranocha). Symmetric and consistent; satisfies [[w]].F = [[psi_m]].
inline FluxVector ranocha_flux(const FluxPrim& a, const FluxPrim& b, int direction,
                               double inv_gm1) {
  const double rho_log = log_mean_impl(a.rho, b.rho, a.log_rho, b.log_rho);
  const double inv_rho_p_mean =
      1.0 / log_mean_impl(a.rho / a.p, b.rho / b.p, a.log_rho_p, b.log_rho_p);
  const double u1_avg = 0.5 * (a.u1 + b.u1);
  const double u2_avg = 0.5 * (a.u2 + b.u2);
  const double p_avg = 0.5 * (a.p + b.p);
  const double vel_dot_avg = 0.5 * (a.u1 * b.u1 + a.u2 * b.u2);

  const double un_avg = direction == 1 ? u1_avg : u2_avg;
  const double f_rho = rho_log * un_avg;
  FluxVector f{f_rho, f_rho * u1_avg, f_rho * u2_avg,
               f_rho * (vel_dot_avg + inv_rho_p_mean * inv_gm1)};
  if (direction == 1) {
    f[1] += p_avg;
    f[3] += 0.5 * (a.p * b.u1 + b.p * a.u1);
  } else {
    f[2] += p_avg;
    f[3] += 0.5 * (a.p * b.u2 + b.p * a.u2);
  }
  return f;
}

inline FluxVector ranocha_flux(const ConservedState& ua, const ConservedState& ub,
                               int direction, const GasModel& gas) {
  return ranocha_flux(make_flux_prim(ua, gas), make_flux_prim(ub, gas), direction,
                      1.0 / (gas.gamma - 1.0));
}

/// Entropy-conservative, kinetic-energy-preserving two-point volume flux
/// built on log means of rho and of beta = rho/(2p) (Chandrashekar).
inline FluxVector chandrashekar_flux(const FluxPrim& a, const FluxPrim& b, int direction,
                                     double inv_gm1) {
  constexpr double log_half = -0.6931471805599453094172321214581766;  // log(1/2)
  const double beta_a = 0.5 * a.rho / a.p;
  const double beta_b = 0.5 * b.rho / b.p;
  const double rho_log = log_mean_impl(a.rho, b.rho, a.log_rho, b.log_rho);
  const double beta_log =
      log_mean_impl(beta_a, beta_b, a.log_rho_p + log_half, b.log_rho_p + log_half);
  const double rho_avg = 0.5 * (a.rho + b.rho);
  const double beta_avg = 0.5 * (beta_a + beta_b);
  const double u1_avg = 0.5 * (a.u1 + b.u1);
  const double u2_avg = 0.5 * (a.u2 + b.u2);
  const double p_hat = 0.5 * rho_avg / beta_avg;
  // grouped so the exchange a <-> b commutes bitwise
  const double vel_sq_bar =
      0.5 * ((a.u1 * a.u1 + a.u2 * a.u2) + (b.u1 * b.u1 + b.u2 * b.u2));

  const double un_avg = direction == 1 ? u1_avg : u2_avg;
  const double f_rho = rho_log * un_avg;
  FluxVector f{f_rho, f_rho * u1_avg, f_rho * u2_avg,
               f_rho * (0.5 * inv_gm1 / beta_log - 0.5 * vel_sq_bar +
                        u1_avg * u1_avg + u2_avg * u2_avg) +
                   p_hat * un_avg};
  if (direction == 1)
    f[1] += p_hat;
  else
    f[2] += p_hat;
  return f;
}

inline FluxVector chandrashekar_flux(const ConservedState& ua, const ConservedState& ub,
                                     int direction, const GasModel& gas) {
  return chandrashekar_flux(make_flux_prim(ua, gas), make_flux_prim(ub, gas), direction,
                            1.0 / (gas.gamma - 1.0));
}

/// Local Lax-Friedrichs surface flux in the dissipative state-difference form
///   1/2 (f(U-) + f(U+)).n - lam/2 (U+ - U-),  lam = max wave speed.
/// Conservative across the face and entropy stable.
inline FluxVector llf_flux(const FluxPrim& a, const FluxPrim& b, AxisNormal n) {
  const double lam = 0.5 * std::max(a.lam, b.lam);
  const FluxVector fa = physical_flux(a, n.axis);
  const FluxVector fb = physical_flux(b, n.axis);
  const double s = 0.5 * n.sign;
  return {s * (fa[0] + fb[0]) - lam * (b.rho - a.rho),
          s * (fa[1] + fb[1]) - lam * (b.rho * b.u1 - a.rho * a.u1),
          s * (fa[2] + fb[2]) - lam * (b.rho * b.u2 - a.rho * a.u2),
          s * (fa[3] + fb[3]) - lam * (b.E - a.E)};
}

inline FluxVector llf_flux(const ConservedState& ua, const ConservedState& ub,
                           AxisNormal n, const GasModel& gas) {
  if (n.axis != 1 && n.axis != 2) throw std::invalid_argument("llf_flux: axis must be 1 or 2");
  if (n.sign != 1 && n.sign != -1) throw std::invalid_argument("llf_flux: sign must be +-1");
  return llf_flux(make_flux_prim(ua, gas), make_flux_prim(ub, gas), n);
}

/// Entropy-condition residual [[w]]^T flux - [[psi_direction]] with the jump
/// convention [[x]] = x(Ub) - x(Ua). Zero for entropy-conservative fluxes,
/// nonpositive for entropy-stable ones.
inline double ec_residual(const ConservedState& ua, const ConservedState& ub,
                          const FluxVector& flux, int direction, const GasModel& gas) {
  const EntropyVars wa = entropy_variables(ua, gas);
  const EntropyVars wb = entropy_variables(ub, gas);
  const double psi_a = direction == 1 ? ua.m1 : ua.m2;
  const double psi_b = direction == 1 ? ub.m1 : ub.m2;
  return (wb.w1 - wa.w1) * flux[0] + (wb.w2 - wa.w2) * flux[1] +
         (wb.w3 - wa.w3) * flux[2] + (wb.w4 - wa.w4) * flux[3] - (psi_b - psi_a);
}

}  // namespace esdg
