#include <doctest.h>

#include <cmath>

#include "esdg/time_integration.hpp"
#include "esdg/kelvin_helmholtz.hpp"
#include "test_util.hpp"

using namespace esdg;
using esdg::testutil::DensityWave;

namespace {

const GasModel kGas{1.4};

SchemeConfig kh_scheme(int degree) {
  SchemeConfig cfg;
  cfg.degree = degree;
  return cfg;
}

}  // namespace

TEST_SUITE("time_integration") {

TEST_CASE("cfl step size by hand") {
  const LobattoBasis1D basis = build_lobatto_basis(1);
  SolutionField u(CartesianMesh2D(32), basis);
  u.fill(to_conserved({1.0, 0.0, 0.0, 1.0}, kGas));
  const TimeConfig tc{.cfl = 1.3, .t_end = 1.0};
  const double c = std::sqrt(1.4);
  CHECK(compute_dt(u, kh_scheme(1), tc) ==
        doctest::Approx(1.3 * (1.0 / 32) / (3.0 * 2.0 * c)).epsilon(1e-14));

  SolutionField u2(CartesianMesh2D(64), basis);
  u2.fill(to_conserved({1.0, 0.0, 0.0, 1.0}, kGas));
  CHECK(compute_dt(u2, kh_scheme(1), tc) ==
        doctest::Approx(0.5 * compute_dt(u, kh_scheme(1), tc)).epsilon(1e-13));

  // faster flow shortens the step
  SolutionField u3(CartesianMesh2D(32), basis);
  u3.fill(to_conserved({1.0, 2.0, 0.0, 1.0}, kGas));
  CHECK(compute_dt(u3, kh_scheme(1), tc) < compute_dt(u, kh_scheme(1), tc));
}

TEST_CASE("stepper is fourth order on a scalar surrogate") {
  auto rhs = [](const std::vector<double>& y, std::vector<double>& r) { r[0] = -y[0]; };
  auto no_post = [](std::vector<double>&) {};
  double prev_err = 0.0, order = 0.0;
  for (int n : {10, 20, 40, 80}) {
    std::vector<double> y{1.0}, q2(1), rate(1);
    const double dt = 1.0 / n;
    for (int k = 0; k < n; ++k) ssprk_10_4_step(y, dt, rhs, no_post, q2, rate);
    const double err = std::abs(y[0] - std::exp(-1.0));
    if (prev_err > 0.0) order = std::log2(prev_err / err);
    prev_err = err;
  }
  CHECK(order == doctest::Approx(4.0).epsilon(0.08));
}

TEST_CASE("constant fields are steady states of a full step") {
  const LobattoBasis1D basis = build_lobatto_basis(2);
  SolutionField u(CartesianMesh2D(4), basis);
  u.fill(to_conserved({1.0, 0.4, -0.2, 1.5}, kGas));
  const SolutionField before = u;
  const SchemeConfig cfg = kh_scheme(2);

  RhsWorkspace ws;
  SolutionField q2 = u, rate = u;
  auto rhs = [&](const SolutionField& s, SolutionField& r) { compute_rhs(s, cfg, r, ws); };
  auto post = [&](SolutionField& s) { positivity_limit(s, cfg.bounds, cfg.gas); };
  ssprk_10_4_step(u, 0.01, rhs, post, q2, rate);
  double worst = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    worst = std::max(worst, std::abs(u.data()[k] - before.data()[k]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("one step preserves the linear invariants") {
  const LobattoBasis1D basis = build_lobatto_basis(1);
  const KHParams params = kh_params(20220119);
  SolutionField u = project_initial(CartesianMesh2D(16), basis, params, kGas);
  const auto before = conserved_totals(u);

  const SchemeConfig cfg = kh_scheme(1);
  RhsWorkspace ws;
  SolutionField q2 = u, rate = u;
  const double dt = compute_dt(u, cfg, TimeConfig{.cfl = 1.3, .t_end = 1.0});
  auto rhs = [&](const SolutionField& s, SolutionField& r) { compute_rhs(s, cfg, r, ws); };
  auto post = [&](SolutionField& s) { positivity_limit(s, cfg.bounds, cfg.gas); };
  ssprk_10_4_step(u, dt, rhs, post, q2, rate);

  const auto after = conserved_totals(u);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(after[m] - before[m]) <= 1e-12);
}

TEST_CASE("relaxation leaves an entropy-conservative step alone") {
  const DensityWave wave;
  const LobattoBasis1D basis = build_lobatto_basis(1);
  SolutionField u = wave.project(CartesianMesh2D(8), basis, kGas);
  SchemeConfig cfg = kh_scheme(1);
  cfg.flux_choice.surface_flux = SurfaceFlux::Ranocha;

  RhsWorkspace ws;
  SolutionField q2 = u, rate = u;
  const SolutionField before = u;
  const double dt = 1e-3;
  auto rhs = [&](const SolutionField& s, SolutionField& r) { compute_rhs(s, cfg, r, ws); };
  auto no_post = [](SolutionField&) {};
  ssprk_10_4_step(u, dt, rhs, no_post, q2, rate);

  const RelaxationResult res = relaxation_adjust(before, u, dt, cfg);
  CHECK(res.gamma == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("relaxation root agrees with a dense scan oracle") {
  const KHParams params = kh_params(20220119);
  const LobattoBasis1D basis = build_lobatto_basis(1);
  SolutionField u = project_initial(CartesianMesh2D(4), basis, params, kGas);
  const SchemeConfig cfg = kh_scheme(1);

  RhsWorkspace ws;
  SolutionField q2 = u, rate = u;
  const SolutionField before = u;
  const double dt = 0.6 * compute_dt(u, cfg, TimeConfig{.cfl = 1.3, .t_end = 1.0});
  auto rhs = [&](const SolutionField& s, SolutionField& r) { compute_rhs(s, cfg, r, ws); };
  auto post = [&](SolutionField& s) { positivity_limit(s, cfg.bounds, cfg.gas); };
  ssprk_10_4_step(u, dt, rhs, post, q2, rate);

  // oracle: the same residual the adjuster roots, scanned densely over gamma
  const double eta_old = total_entropy(before, kGas);
  SolutionField u_new = u;
  const double estimate = 0.5 * (entropy_interface_production(before, cfg) +
                                 entropy_interface_production(u_new, cfg));
  auto residual = [&](double gamma) {
    SolutionField trial = u_new;
    for (std::size_t k = 0; k < trial.size(); ++k)
      trial.data()[k] = before.data()[k] + gamma * (u_new.data()[k] - before.data()[k]);
    return total_entropy(trial, kGas) - eta_old - gamma * dt * estimate;
  };
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool found = false;
  double prev = residual(0.9);
  for (int k = 1; k <= 200000 && !found; ++k) {
    const double g = 0.9 + 0.2 * k / 200000.0;
    const double r = residual(g);
    if ((r < 0.0) != (prev < 0.0)) {
      bracket_lo = 0.9 + 0.2 * (k - 1) / 200000.0;
      bracket_hi = g;
      found = true;
    }
    prev = r;
  }

  const RelaxationResult res = relaxation_adjust(before, u, dt, cfg);
  if (found) {
    CHECK(res.adjusted);
    CHECK(res.gamma >= bracket_lo - 1e-10);
    CHECK(res.gamma <= bracket_hi + 1e-10);
  } else {
    CHECK_FALSE(res.adjusted);  // both agree there is no root
  }
}

TEST_CASE("relaxed step does not raise total entropy on the shear layer") {
  const KHParams params = kh_params(20220119);
  const LobattoBasis1D basis = build_lobatto_basis(1);
  SolutionField u = project_initial(CartesianMesh2D(16), basis, params, kGas);
  SchemeConfig cfg = kh_scheme(1);
  TimeConfig tc{.cfl = 1.3, .t_end = 0.0, .relaxation_enabled = true};

  const double eta0 = total_entropy(u, kGas);
  RhsWorkspace ws;
  SolutionField q2 = u, rate = u;
  const SolutionField before = u;
  const double dt = compute_dt(u, cfg, tc);
  auto rhs = [&](const SolutionField& s, SolutionField& r) { compute_rhs(s, cfg, r, ws); };
  auto post = [&](SolutionField& s) { positivity_limit(s, cfg.bounds, cfg.gas); };
  ssprk_10_4_step(u, dt, rhs, post, q2, rate);
  relaxation_adjust(before, u, dt, cfg);
  CHECK(total_entropy(u, kGas) <= eta0 + 1e-12 * std::abs(eta0));
}

TEST_CASE("run driver") {
  const KHParams params = kh_params(20220119);
  const LobattoBasis1D basis = build_lobatto_basis(1);
  const SolutionField u0 = project_initial(CartesianMesh2D(16), basis, params, kGas);
  const SchemeConfig cfg = kh_scheme(1);

  // t_end = 0 returns the initial state
  const RunResult zero = run(u0, cfg, TimeConfig{.cfl = 1.3, .t_end = 0.0});
  CHECK(zero.steps == 0);
  CHECK(std::equal(zero.state.data(), zero.state.data() + zero.state.size(), u0.data()));

  const RunResult result = run(u0, cfg, TimeConfig{.cfl = 1.3, .t_end = 0.05});
  CHECK(result.series.front().t == 0.0);
  CHECK(result.series.back().t == doctest::Approx(0.05).epsilon(1e-12));

  // periodic conservation over the horizon
  const StepRecord& first = result.series.front();
  const StepRecord& last = result.series.back();
  CHECK(std::abs(last.mass - first.mass) <= 1e-11);
  CHECK(std::abs(last.energy - first.energy) <= 1e-11);

  // entropy never increases along the series
  for (std::size_t k = 1; k < result.series.size(); ++k)
    CHECK(result.series[k].total_entropy <=
          result.series[k - 1].total_entropy + 1e-10 * 16 * 16);

  CHECK(result.integrated_weak_bv > 0.0);

  // hard step guard
  CHECK_THROWS_AS(run(u0, cfg, TimeConfig{.cfl = 1.3, .t_end = 1.0, .max_steps = 3}),
                  std::runtime_error);
}

TEST_CASE("spatial accuracy on a smooth traveling wave") {
  const DensityWave wave;
  const double t_end = 0.05;
  for (int p : {1, 2}) {
    CAPTURE(p);
    std::vector<double> errors;
    for (int n : {8, 16, 32}) {
      const LobattoBasis1D basis = build_lobatto_basis(p);
      const CartesianMesh2D mesh(n);
      const SolutionField u0 = wave.project(mesh, basis, kGas);
      SchemeConfig cfg = kh_scheme(p);
      const RunResult result =
          run(u0, cfg, TimeConfig{.cfl = 0.4, .t_end = t_end});
      // L1 density error against the exact transported profile
      double err = 0.0;
      const double cell = mesh.h() * mesh.h() / 4.0;
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto [i, j] = mesh.coords(e);
        for (int b = 0; b <= p; ++b)
          for (int a = 0; a <= p; ++a) {
            const auto [x, y] = physical_node(mesh, i, j, basis, a, b);
            err += cell * basis.weights[a] * basis.weights[b] *
                   std::abs(result.state.state(e, a, b).rho - wave.rho(x, y, t_end));
          }
      }
      errors.push_back(err);
    }
    const double order = std::log2(errors[errors.size() - 2] / errors.back());
    CHECK(order >= p + 0.8);
  }
}

}  // TEST_SUITE
