#include <doctest.h>

#include <cmath>

#include "esdg/kelvin_helmholtz.hpp"
#include "esdg/analysis.hpp"

using namespace esdg;

namespace {
const GasModel kGas{1.4};
}

TEST_SUITE("kelvin_helmholtz") {

TEST_CASE("parameters are deterministic and normalized") {
  const KHParams a = kh_params(20220119);
  const KHParams b = kh_params(20220119);
  for (int j = 0; j < 2; ++j)
    for (int m = 0; m < a.modes; ++m) {
      CHECK(a.a[j][m] == b.a[j][m]);
      CHECK(a.b[j][m] == b.b[j][m]);
      CHECK(a.a[j][m] >= 0.0);
      CHECK(a.b[j][m] >= -M_PI);
      CHECK(a.b[j][m] <= M_PI);
    }
  const KHParams other = kh_params(7);
  CHECK(other.a[0][0] != a.a[0][0]);

  for (int j = 0; j < 2; ++j) {
    double sum = 0.0;
    for (double v : a.a[j]) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-14);
  }

  // |I_j - J_j| <= epsilon everywhere, and the profile is 1-periodic
  for (int j = 0; j < 2; ++j) {
    const double base = j == 0 ? a.j1 : a.j2;
    for (int k = 0; k < 10000; ++k) {
      const double x = k / 10000.0;
      CHECK(std::abs(kh_interface(a, j, x) - base) <= a.epsilon + 1e-15);
    }
    CHECK(kh_interface(a, j, 0.0) == doctest::Approx(kh_interface(a, j, 1.0)).epsilon(1e-13));
  }

  CHECK_THROWS_AS(kh_params(1, 0), std::invalid_argument);
}

TEST_CASE("layer states") {
  KHParams flat = kh_params(20220119);
  flat.epsilon = 0.0;

  const PrimitiveState inner = kh_initial_primitive(0.3, 0.5, flat);
  CHECK(inner.rho == 2.0);
  CHECK(inner.u1 == -0.5);
  CHECK(inner.u2 == 0.0);
  CHECK(inner.p == 2.5);

  const PrimitiveState outer = kh_initial_primitive(0.3, 0.9, flat);
  CHECK(outer.rho == 1.0);
  CHECK(outer.u1 == 0.5);
  CHECK(outer.p == 2.5);

  const ConservedState mid = kh_initial_state(0.3, 0.5, flat, kGas);
  CHECK(mid.rho == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mid.m1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mid.m2 == 0.0);
  CHECK(mid.E == doctest::Approx(6.5).epsilon(1e-15));
}

TEST_CASE("nodal projection") {
  KHParams flat = kh_params(20220119);
  flat.epsilon = 0.0;
  const LobattoBasis1D basis = build_lobatto_basis(1);
  const CartesianMesh2D mesh(32);
  const SolutionField u = project_initial(mesh, basis, flat, kGas);

  // away from the interfaces each element is constant
  const int low = mesh.index(3, 3);   // strictly inside the outer layer
  for (int k = 1; k < u.nodes_per_element(); ++k)
    CHECK(u.state(low, k).rho == u.state(low, 0).rho);

  // mass within quadrature reach of the two-layer integral 1.5
  const double mass = l1_norm_field(u)[0];
  CHECK(std::abs(mass - 1.5) <= 2.0 * mesh.h());

  // pressure uniformly 2.5, speed bounded by 0.5 at every node
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int k = 0; k < u.nodes_per_element(); ++k) {
      const PrimitiveState q = to_primitive(u.state(e, k), kGas);
      CHECK(q.p == doctest::Approx(2.5).epsilon(1e-13));
      CHECK(std::hypot(q.u1, q.u2) <= 0.5 + 1e-14);
    }

  // determinism extends through projection
  const KHParams again = kh_params(20220119);
  const SolutionField v1 = project_initial(mesh, basis, again, kGas);
  const SolutionField v2 = project_initial(mesh, basis, kh_params(20220119), kGas);
  CHECK(std::equal(v1.data(), v1.data() + v1.size(), v2.data()));
}

}  // TEST_SUITE
