#include "esdg/time_integration.hpp"

#include <cmath>
#include <stdexcept>

namespace esdg {

namespace {

double pairwise(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  if (hi - lo <= 8) {
    double s = v[lo];
    for (std::size_t k = lo + 1; k < hi; ++k) s += v[k];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

}  // namespace

double compute_dt(const SolutionField& u, const SchemeConfig& cfg, const TimeConfig& tc) {
  const int ne = u.mesh().num_elements();
  const int nne = u.nodes_per_element();
  const double gamma = cfg.gas.gamma;
  double ax = 0.0, ay = 0.0;
#pragma omp parallel for schedule(static) reduction(max : ax, ay)
  for (int e = 0; e < ne; ++e) {
    for (int k = 0; k < nne; ++k) {
      const double* q = u.node_ptr(e, k);
      const double inv_rho = 1.0 / q[0];
      const double u1 = q[1] * inv_rho, u2 = q[2] * inv_rho;
      const double p = (gamma - 1.0) * (q[3] - 0.5 * (q[1] * u1 + q[2] * u2));
      const double c = std::sqrt(gamma * p * inv_rho);
      ax = std::max(ax, std::abs(u1) + c);
      ay = std::max(ay, std::abs(u2) + c);
    }
  }
  if (!std::isfinite(ax) || !std::isfinite(ay))
    throw std::runtime_error("compute_dt: nonfinite wave speed");
  const double degree = u.basis().degree;
  return tc.cfl * u.mesh().h() / ((2.0 * degree + 1.0) * (ax + ay));
}

std::array<double, 4> conserved_totals(const SolutionField& u) {
  const int ne = u.mesh().num_elements();
  const int nn = u.nodes_per_dir();
  const double cell = u.mesh().h() * u.mesh().h() / 4.0;
  std::vector<double> part(static_cast<std::size_t>(ne) * 4);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    double s[4] = {0, 0, 0, 0};
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a) {
        const double w = u.basis().weights[a] * u.basis().weights[b];
        const double* q = u.node_ptr(e, b * nn + a);
        for (int m = 0; m < 4; ++m) s[m] += w * q[m];
      }
    for (int m = 0; m < 4; ++m) part[static_cast<std::size_t>(e) * 4 + m] = s[m];
  }
  std::array<double, 4> total{};
  std::vector<double> comp(ne);
  for (int m = 0; m < 4; ++m) {
    for (int e = 0; e < ne; ++e) comp[e] = part[static_cast<std::size_t>(e) * 4 + m];
    total[m] = cell * pairwise(comp, 0, comp.size());
  }
  return total;
}

double total_entropy(const SolutionField& u, const GasModel& gas) {
  const int ne = u.mesh().num_elements();
  const int nn = u.nodes_per_dir();
  const double cell = u.mesh().h() * u.mesh().h() / 4.0;
  std::vector<double> part(ne);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    double s = 0.0;
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a) {
        const double w = u.basis().weights[a] * u.basis().weights[b];
        s += w * math_entropy(u.state(e, b * nn + a), gas);
      }
    part[e] = s;
  }
  return cell * pairwise(part, 0, part.size());
}

RelaxationResult relaxation_adjust(const SolutionField& u_old, SolutionField& u_new,
                                   double dt, const SchemeConfig& cfg) {
  const double eta_old = total_entropy(u_old, cfg.gas);
  const double estimate = 0.5 * (entropy_interface_production(u_old, cfg) +
                                 entropy_interface_production(u_new, cfg));

  SolutionField trial = u_new;
  auto residual = [&](double gamma) {
    for (std::size_t k = 0; k < trial.size(); ++k)
      trial.data()[k] = u_old.data()[k] + gamma * (u_new.data()[k] - u_old.data()[k]);
    return total_entropy(trial, cfg.gas) - eta_old - gamma * dt * estimate;
  };

  const double scale = std::max(1.0, std::abs(eta_old));
  if (std::abs(residual(1.0)) <= 1e-12 * scale) return {1.0, false};

  double lo = 0.9, hi = 1.1;
  double rlo = residual(lo), rhi = residual(hi);
  if ((rlo < 0.0) == (rhi < 0.0)) return {1.0, false};  // no bracket; keep the step
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double rm = residual(mid);
    if ((rm < 0.0) == (rlo < 0.0)) {
      lo = mid;
      rlo = rm;
    } else {
      hi = mid;
    }
  }
  const double gamma = 0.5 * (lo + hi);
  for (std::size_t k = 0; k < u_new.size(); ++k)
    u_new.data()[k] = u_old.data()[k] + gamma * (u_new.data()[k] - u_old.data()[k]);
  return {gamma, true};
}

RunResult run(const SolutionField& u0, const SchemeConfig& cfg, const TimeConfig& tc,
              const StepCallback& on_step) {
  if (tc.t_end < 0.0) throw std::invalid_argument("run: t_end must be nonnegative");
  RunResult result{u0, {}, 0.0, 0};
  SolutionField& u = result.state;
  SolutionField q2 = u, rate = u;
  RhsWorkspace ws;

  auto record = [&](long step, double t, double dt, double min_theta, long limited) {
    StepRecord r;
    r.step = step;
    r.t = t;
    r.dt = dt;
    const auto totals = conserved_totals(u);
    r.mass = totals[0];
    r.mom_x = totals[1];
    r.mom_y = totals[2];
    r.energy = totals[3];
    r.total_entropy = total_entropy(u, cfg.gas);
    r.weak_bv = weak_bv_sum(u, cfg);
    r.min_theta = min_theta;
    r.elements_limited = limited;
    result.series.push_back(r);
    if (on_step) on_step(r, u);
    return r;
  };

  StepRecord prev = record(0, 0.0, 0.0, 1.0, 0);

  double t = 0.0;
  while (t < tc.t_end && tc.t_end - t > 1e-14 * tc.t_end) {
    if (result.steps >= tc.max_steps) throw std::runtime_error("run: max_steps exceeded");
    double dt = compute_dt(u, cfg, tc);
    if (t + dt >= tc.t_end) dt = tc.t_end - t;  // land exactly on t_end

    double min_theta = 1.0;
    long limited = 0;
    auto rhs = [&](const SolutionField& s, SolutionField& r) { compute_rhs(s, cfg, r, ws); };
    auto post = [&](SolutionField& s) {
      const LimiterReport rep = positivity_limit(s, cfg.bounds, cfg.gas);
      min_theta = std::min(min_theta, rep.min_theta);
      limited = std::max(limited, rep.elements_limited);
    };

    if (tc.relaxation_enabled) {
      const SolutionField u_before = u;
      ssprk_10_4_step(u, dt, rhs, post, q2, rate);
      relaxation_adjust(u_before, u, dt, cfg);
    } else {
      ssprk_10_4_step(u, dt, rhs, post, q2, rate);
    }

    t += dt;
    ++result.steps;
    const StepRecord now = record(result.steps, t, dt, min_theta, limited);
    result.integrated_weak_bv += 0.5 * (prev.weak_bv + now.weak_bv) * dt;
    prev = now;
  }
  return result;
}

}  // namespace esdg
