#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "esdg/field.hpp"

namespace esdg {

/// Seeded interface-perturbation parameters for the shear-layer problem.
/// The amplitude coefficients of each interface are normalized to sum to one,
/// which bounds the interface displacement by epsilon.
struct KHParams {
  int modes = 10;
  double epsilon = 0.01;
  double j1 = 0.25;  ///< lower interface height
  double j2 = 0.75;  ///< upper interface height
  std::uint64_t seed = 20220119;
  std::array<std::vector<double>, 2> a;  ///< amplitudes in [0,1], normalized per interface
  std::array<std::vector<double>, 2> b;  ///< phases in [-pi, pi]
};

/// Draws the perturbation coefficients with the splitmix64 generator so the
/// realization is bit-reproducible across platforms from the seed alone.
/// Order of draws: a[0][0..M-1], a[1][0..M-1], b[0][0..M-1], b[1][0..M-1];
/// uniforms map a 64-bit word to [0,1) via (x >> 11) * 2^-53.
KHParams kh_params(std::uint64_t seed, int modes = 10, double epsilon = 0.01);

/// Perturbed interface height I_j(x) = J_j + epsilon * sum_m a_m cos(b_m + 2 pi m x),
/// 1-periodic in x. interface_index is 0 (lower) or 1 (upper).
double kh_interface(const KHParams& params, int interface_index, double x);

/// Three-layer shear state: primitive (2, -0.5, 0, 2.5) between the two
/// interfaces, (1, 0.5, 0, 2.5) outside.
PrimitiveState kh_initial_primitive(double x, double y, const KHParams& params);
ConservedState kh_initial_state(double x, double y, const KHParams& params,
                                const GasModel& gas);

/// Nodal collocation of the initial data at the physical Gauss-Lobatto nodes.
SolutionField project_initial(const CartesianMesh2D& mesh, const LobattoBasis1D& basis,
                              const KHParams& params, const GasModel& gas);

/// splitmix64: the fixed, portable 64-bit generator behind kh_params.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace esdg
