#include "esdg/kelvin_helmholtz.hpp"

#include <cmath>
#include <stdexcept>

namespace esdg {

KHParams kh_params(std::uint64_t seed, int modes, double epsilon) {
  if (modes < 1) throw std::invalid_argument("kh_params: modes must be >= 1");
  KHParams p;
  p.modes = modes;
  p.epsilon = epsilon;
  p.seed = seed;
  std::uint64_t state = seed;
  for (int j = 0; j < 2; ++j) {
    p.a[j].resize(modes);
    double sum = 0.0;
    for (int m = 0; m < modes; ++m) {
      p.a[j][m] = uniform01(state);
      sum += p.a[j][m];
    }
    for (int m = 0; m < modes; ++m) p.a[j][m] /= sum;
  }
  for (int j = 0; j < 2; ++j) {
    p.b[j].resize(modes);
    for (int m = 0; m < modes; ++m) p.b[j][m] = -M_PI + 2.0 * M_PI * uniform01(state);
  }
  return p;
}

double kh_interface(const KHParams& params, int interface_index, double x) {
  const double base = interface_index == 0 ? params.j1 : params.j2;
  double y = 0.0;
  for (int m = 0; m < params.modes; ++m)
    y += params.a[interface_index][m] *
         std::cos(params.b[interface_index][m] + 2.0 * M_PI * (m + 1) * x);
  return base + params.epsilon * y;
}

PrimitiveState kh_initial_primitive(double x, double y, const KHParams& params) {
  const double i1 = kh_interface(params, 0, x);
  const double i2 = kh_interface(params, 1, x);
  if (i1 <= y && y <= i2) return {2.0, -0.5, 0.0, 2.5};
  return {1.0, 0.5, 0.0, 2.5};
}

ConservedState kh_initial_state(double x, double y, const KHParams& params,
                                const GasModel& gas) {
  return to_conserved(kh_initial_primitive(x, y, params), gas);
}

SolutionField project_initial(const CartesianMesh2D& mesh, const LobattoBasis1D& basis,
                              const KHParams& params, const GasModel& gas) {
  SolutionField u(mesh, basis);
  const int nn = basis.num_nodes();
#pragma omp parallel for schedule(static)
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto [i, j] = mesh.coords(e);
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a) {
        const auto [x, y] = physical_node(mesh, i, j, basis, a, b);
        u.set_state(e, a, b, kh_initial_state(x, y, params, gas));
      }
  }
  return u;
}

}  // namespace esdg
