#pragma once

#include <functional>
#include <vector>

#include "esdg/field.hpp"
#include "esdg/limiter.hpp"
#include "esdg/solver.hpp"

namespace esdg {

struct TimeConfig {
  double cfl = 1.3;
  double t_end = 0.0;
  bool relaxation_enabled = false;
  long max_steps = 20000000;
};

/// CFL step size cfl * h / ((2p+1) (a_x + a_y)) with a_x = max(|u1| + c),
/// a_y = max(|u2| + c) over all nodes. The caller clips the final step onto
/// t_end.
double compute_dt(const SolutionField& u, const SchemeConfig& cfg, const TimeConfig& tc);

// Vector-space kernels the generic stepper needs; overloads are provided for
// std::vector<double> and SolutionField.
inline void ts_axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}
inline void ts_scale_add(double a, const std::vector<double>& x, double b,
                         std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = a * x[k] + b * y[k];
}
inline void ts_axpy(double a, const SolutionField& x, SolutionField& y) {
  ts_axpy(a, x.raw(), y.raw());
}
inline void ts_scale_add(double a, const SolutionField& x, double b, SolutionField& y) {
  ts_scale_add(a, x.raw(), b, y.raw());
}

/// One step of the ten-stage, fourth-order strong-stability-preserving
/// Runge-Kutta scheme (Ketcheson's low-storage form). Every combination is
/// convex, so nodewise admissibility survives each stage given the per-stage
/// post hook (the positivity limiter in production, a no-op in ODE tests).
///
/// rhs(u, rate) evaluates du/dt; post(u) runs after every update of u.
template <class Vec, class Rhs, class Post>
void ssprk_10_4_step(Vec& u, double dt, Rhs&& rhs, Post&& post, Vec& q2, Vec& rate) {
  q2 = u;
  for (int i = 0; i < 5; ++i) {
    rhs(u, rate);
    ts_axpy(dt / 6.0, rate, u);
    post(u);
  }
  ts_scale_add(9.0 / 25.0, u, 1.0 / 25.0, q2);  // q2 <- 1/25 u0 + 9/25 u5
  ts_scale_add(15.0, q2, -5.0, u);              // u  <- 3/5 u0 + 2/5 u5
  post(u);
  for (int i = 0; i < 4; ++i) {
    rhs(u, rate);
    ts_axpy(dt / 6.0, rate, u);
    post(u);
  }
  rhs(u, rate);
  ts_scale_add(1.0, q2, 3.0 / 5.0, u);  // u <- q2 + 3/5 u9
  ts_axpy(0.1 * dt, rate, u);
  post(u);
}

/// Quadrature totals of the conserved quantities (mass, momentum, energy).
std::array<double, 4> conserved_totals(const SolutionField& u);

/// Quadrature total of the mathematical entropy.
double total_entropy(const SolutionField& u, const GasModel& gas);

struct RelaxationResult {
  double gamma = 1.0;
  bool adjusted = false;  ///< false when the condition already held or no root was bracketed
};

/// Scales the step increment u_new - u_old by gamma near 1 so that the total
/// discrete entropy change matches the time-integrated interface production
/// estimate. Modifies u_new in place when a root is found in [0.9, 1.1];
/// otherwise leaves it untouched.
RelaxationResult relaxation_adjust(const SolutionField& u_old, SolutionField& u_new,
                                   double dt, const SchemeConfig& cfg);

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double mom_x = 0.0;
  double mom_y = 0.0;
  double energy = 0.0;
  double total_entropy = 0.0;
  double weak_bv = 0.0;
  double min_theta = 1.0;      ///< smallest limiter theta over the step's stages
  long elements_limited = 0;   ///< widest stage extent of limiting in the step
};

using StepCallback = std::function<void(const StepRecord&, const SolutionField&)>;

struct RunResult {
  SolutionField state;
  std::vector<StepRecord> series;     ///< row 0 is the initial state
  double integrated_weak_bv = 0.0;    ///< trapezoid in time of the weak-BV sum
  long steps = 0;
};

/// Advances u0 to t_end with CFL step control and per-stage limiting.
/// Deterministic: fixed stage order, fixed reduction order.
RunResult run(const SolutionField& u0, const SchemeConfig& cfg, const TimeConfig& tc,
              const StepCallback& on_step = {});

}  // namespace esdg
