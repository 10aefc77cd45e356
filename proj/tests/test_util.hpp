#pragma once

#include <cstdint>

#include "esdg/field.hpp"
#include "esdg/kelvin_helmholtz.hpp"

namespace esdg::testutil {

/// Random admissible states covering the shear-layer regime with margin:
/// rho in [0.1, 5], |u_i| <= 3, p in [0.1, 5].
class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed) : state_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(state_); }

  PrimitiveState primitive() {
    return {uniform(0.1, 5.0), uniform(-3.0, 3.0), uniform(-3.0, 3.0), uniform(0.1, 5.0)};
  }

  ConservedState conserved(const GasModel& gas) { return to_conserved(primitive(), gas); }

 private:
  std::uint64_t state_;
};

/// Fills every node with an independent random admissible state.
inline SolutionField random_field(const CartesianMesh2D& mesh, const LobattoBasis1D& basis,
                                  const GasModel& gas, std::uint64_t seed) {
  SolutionField u(mesh, basis);
  StateSampler sampler(seed);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int k = 0; k < u.nodes_per_element(); ++k) u.set_state(e, k, sampler.conserved(gas));
  return u;
}

/// Exact solution of the Euler system with constant velocity and pressure:
/// a sinusoidal density profile advected along the velocity.
struct DensityWave {
  double u1 = 1.0;
  double u2 = -0.5;
  double p = 1.0;
  double amplitude = 0.2;

  double rho(double x, double y, double t) const {
    return 1.0 + amplitude * std::sin(2.0 * M_PI * (x + y - (u1 + u2) * t));
  }

  ConservedState state(double x, double y, double t, const GasModel& gas) const {
    return to_conserved({rho(x, y, t), u1, u2, p}, gas);
  }

  SolutionField project(const CartesianMesh2D& mesh, const LobattoBasis1D& basis,
                        const GasModel& gas, double t = 0.0) const {
    SolutionField u(mesh, basis);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const auto [i, j] = mesh.coords(e);
      for (int b = 0; b <= basis.degree; ++b)
        for (int a = 0; a <= basis.degree; ++a) {
          const auto [x, y] = physical_node(mesh, i, j, basis, a, b);
          u.set_state(e, a, b, state(x, y, t, gas));
        }
    }
    return u;
  }
};

}  // namespace esdg::testutil
