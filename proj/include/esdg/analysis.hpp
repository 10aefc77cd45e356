#pragma once

#include <functional>
#include <vector>

#include "esdg/field.hpp"

namespace esdg {

enum class Variable { Density, MomentumX, MomentumY, Energy, Entropy };

const char* variable_name(Variable v);

/// One scalar value per node, same layout as SolutionField.
struct NodalScalarField {
  CartesianMesh2D mesh;
  LobattoBasis1D basis;
  std::vector<double> values;
};

/// Nodewise evaluation of the study variable (entropy via the pointwise
/// mathematical entropy of the nodal state).
NodalScalarField extract_variable(const SolutionField& u, Variable v, const GasModel& gas);

/// Evaluates the coarse element polynomials at the target's physical
/// Gauss-Lobatto nodes. Exact for polynomials, no smoothing. The target
/// resolution must be an integer multiple of the source resolution.
SolutionField transfer_to_mesh(const SolutionField& coarse, const CartesianMesh2D& target_mesh,
                               const LobattoBasis1D& target_basis);
NodalScalarField transfer_to_mesh(const NodalScalarField& coarse,
                                  const CartesianMesh2D& target_mesh,
                                  const LobattoBasis1D& target_basis);

/// Quadrature-weighted L1 norms.
double l1_norm(const NodalScalarField& f);
std::array<double, 4> l1_norm_field(const SolutionField& u);

/// Nodewise arithmetic mean of fields living on one common mesh.
SolutionField cesaro_average(const std::vector<const SolutionField*>& fields);
NodalScalarField cesaro_average(const std::vector<const NodalScalarField*>& fields);

/// Experimental order between consecutive mesh doublings.
inline double experimental_order(double err_coarse, double err_fine) {
  return std::log2(err_coarse / err_fine);
}

/// Solutions of one run configuration on a doubling resolution ladder;
/// the finest member is the designated reference.
struct MeshFamilySolution {
  std::vector<SolutionField> members;
};

/// Error table in the layout n | E1-error | E1-order | E2-error | E2-order.
/// Orders are NaN in the first row.
struct ErrorTable {
  std::vector<long> resolutions;
  std::vector<double> e1, e1_order, e2, e2_order;
};

/// E1 is the L1 distance of each member to the finest-mesh reference; E2 the
/// distance between the running Cesaro averages and the Cesaro average over
/// the whole family. All comparisons happen on the reference mesh.
ErrorTable e1_e2_errors(const MeshFamilySolution& family, Variable v, const GasModel& gas);

/// Smooth space-time test function with closed-form derivatives.
struct TestFunctionField {
  std::function<double(double t, double x, double y)> value;
  std::function<double(double t, double x, double y)> dt;
  std::function<double(double t, double x, double y)> dx;
  std::function<double(double t, double x, double y)> dy;
};

struct Trajectory {
  std::vector<double> times;          ///< ascending, first entry is t = 0
  std::vector<SolutionField> states;  ///< snapshot per time
};

/// Weak-form residuals of the trajectory against the test function:
/// [ integral q phi ]_0^tau - int_0^tau integral (q phi_t + flux : grad phi),
/// one value for continuity and each momentum component, and the signed slack
/// of the entropy inequality (nonpositive up to discretization error for
/// phi >= 0). Space by element quadrature, time by the trapezoid rule over
/// the stored snapshots.
struct ConsistencyResidual {
  double continuity = 0.0;
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double entropy_slack = 0.0;
};

ConsistencyResidual consistency_residual(const Trajectory& trajectory,
                                         const TestFunctionField& phi, const GasModel& gas);

}  // namespace esdg
