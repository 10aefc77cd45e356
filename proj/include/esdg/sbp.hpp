#pragma once

#include <functional>
#include <span>
#include <vector>

namespace esdg {

/// One-dimensional Gauss-Lobatto collocation operators on the reference
/// interval [-1,1]. The stiffness matrix satisfies the summation-by-parts
/// identity Q + Q^T = B = diag(-1, 0, ..., 0, 1), which is what the discrete
/// entropy balance of the solver rests on.
///
/// Immutable after construction; safe to share across threads.
struct LobattoBasis1D {
  int degree = 0;
  std::vector<double> nodes;    ///< p+1 nodes, ascending, nodes.front() == -1, nodes.back() == +1
  std::vector<double> weights;  ///< quadrature weights, sum == 2
  std::vector<double> diff;     ///< differentiation matrix D, row-major (p+1)^2, D(j,l) = L_l'(xi_j)
  std::vector<double> stiffness;///< Q = M D, row-major
  std::vector<double> bary;     ///< barycentric weights for interpolation

  int num_nodes() const { return degree + 1; }
  double d(int j, int l) const { return diff[j * (degree + 1) + l]; }
  double q(int j, int l) const { return stiffness[j * (degree + 1) + l]; }

  /// Boundary selector tau_j: -1 at the left node, +1 at the right node, 0 inside.
  double tau(int j) const { return j == 0 ? -1.0 : (j == degree ? 1.0 : 0.0); }
};

/// Builds the degree-p basis. Nodes are the roots of (1-x^2) P_p'(x), found by
/// Newton iteration from Chebyshev-Gauss-Lobatto starting values (tolerance
/// 1e-15), then symmetrized about the origin. Rejects degree < 1 (the boundary
/// matrix degenerates) and degree > 20 (node solver not validated beyond).
LobattoBasis1D build_lobatto_basis(int degree);

/// Evaluates the interpolant with the given nodal values at x in [-1,1]
/// (barycentric form, exact at the nodes). Rejects x outside the interval;
/// a slack of 1e-12 is tolerated for points produced by affine maps.
double evaluate_lagrange(const LobattoBasis1D& basis, std::span<const double> coeffs, double x);

/// Quadrature of f over [a,b] with the basis rule mapped onto the interval.
double gauss_lobatto_integrate(const LobattoBasis1D& basis,
                               const std::function<double(double)>& f,
                               double a, double b);

/// Composite rule over [-1,1] split into `subintervals` equal parts.
double composite_integrate(const LobattoBasis1D& basis,
                           const std::function<double(double)>& f,
                           int subintervals);

/// Measures the convergence order of the composite quadrature error for a
/// smooth f under interval halving (4..64 subintervals against a fine
/// reference). Test instrumentation, not used by the solver.
double quad_error_order_probe(const LobattoBasis1D& basis,
                              const std::function<double(double)>& f);

}  // namespace esdg
