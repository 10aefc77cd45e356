#include "esdg/sbp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esdg {

namespace {

// Legendre P_p and P_{p-1} at x via the three-term recurrence.
struct LegendrePair {
  double p;    // P_p(x)
  double pm1;  // P_{p-1}(x)
};

LegendrePair legendre(int degree, double x) {
  double pm1 = 1.0;
  double p = x;
  for (int k = 1; k < degree; ++k) {
    const double pp1 = ((2.0 * k + 1.0) * x * p - k * pm1) / (k + 1.0);
    pm1 = p;
    p = pp1;
  }
  return {p, pm1};
}

}  // namespace

LobattoBasis1D build_lobatto_basis(int degree) {
  if (degree < 1) throw std::invalid_argument("build_lobatto_basis: degree must be >= 1");
  if (degree > 20) throw std::invalid_argument("build_lobatto_basis: degree > 20 not supported");

  const int n = degree + 1;
  LobattoBasis1D basis;
  basis.degree = degree;
  basis.nodes.assign(n, 0.0);
  basis.weights.assign(n, 0.0);

  basis.nodes[0] = -1.0;
  basis.nodes[degree] = 1.0;

  // Interior nodes: roots of P_p'. Newton with
  //   P_p'(x)  = p (x P_p - P_{p-1}) / (x^2 - 1)
  //   P_p''(x) = (2 x P_p' - p (p+1) P_p) / (1 - x^2)
  for (int j = 1; j < degree; ++j) {
    double x = -std::cos(M_PI * j / degree);
    for (int it = 0; it < 100; ++it) {
      const auto [pp, pm1] = legendre(degree, x);
      const double dp = degree * (x * pp - pm1) / (x * x - 1.0);
      const double d2p = (2.0 * x * dp - degree * (degree + 1.0) * pp) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    basis.nodes[j] = x;
  }
  // Symmetrize to kill asymmetric roundoff; the rule is symmetric by construction.
  for (int j = 0; j < n / 2; ++j) {
    const double v = 0.5 * (basis.nodes[j] - basis.nodes[degree - j]);
    basis.nodes[j] = v;
    basis.nodes[degree - j] = -v;
  }
  if (n % 2 == 1) basis.nodes[degree / 2] = 0.0;

  // w_j = 2 / (p (p+1) P_p(x_j)^2)
  for (int j = 0; j < n; ++j) {
    const double pp = legendre(degree, basis.nodes[j]).p;
    basis.weights[j] = 2.0 / (degree * (degree + 1.0) * pp * pp);
  }
  for (int j = 0; j < n / 2; ++j) {
    const double w = 0.5 * (basis.weights[j] + basis.weights[degree - j]);
    basis.weights[j] = w;
    basis.weights[degree - j] = w;
  }

  // Barycentric weights and the differentiation matrix. The diagonal uses the
  // negative-sum trick so every row of D sums to zero exactly.
  basis.bary.assign(n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      if (l != j) basis.bary[j] *= basis.nodes[j] - basis.nodes[l];
    }
    basis.bary[j] = 1.0 / basis.bary[j];
  }
  basis.diff.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double rowsum = 0.0;
    for (int l = 0; l < n; ++l) {
      if (l == j) continue;
      const double v = (basis.bary[l] / basis.bary[j]) / (basis.nodes[j] - basis.nodes[l]);
      basis.diff[j * n + l] = v;
      rowsum += v;
    }
    basis.diff[j * n + j] = -rowsum;
  }

  basis.stiffness.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      basis.stiffness[j * n + l] = basis.weights[j] * basis.diff[j * n + l];

  // If the SBP defect of the raw construction is above 1e-13, restore the
  // identity Q + Q^T = B by the symmetric correction and refit D = M^{-1} Q.
  double defect = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      double b = 0.0;
      if (j == l) b = (j == 0) ? -1.0 : (j == degree ? 1.0 : 0.0);
      defect = std::max(defect, std::abs(basis.q(j, l) + basis.q(l, j) - b));
    }
  }
  if (defect > 1e-13) {
    std::vector<double> q(basis.stiffness);
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        double b = 0.0;
        if (j == l) b = (j == 0) ? -1.0 : (j == degree ? 1.0 : 0.0);
        basis.stiffness[j * n + l] = 0.5 * (q[j * n + l] + b - q[l * n + j]);
      }
    }
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        basis.diff[j * n + l] = basis.stiffness[j * n + l] / basis.weights[j];
  }

  return basis;
}

double evaluate_lagrange(const LobattoBasis1D& basis, std::span<const double> coeffs, double x) {
  const int n = basis.num_nodes();
  if (static_cast<int>(coeffs.size()) != n)
    throw std::invalid_argument("evaluate_lagrange: coefficient count mismatch");
  if (x < -1.0 - 1e-12 || x > 1.0 + 1e-12)
    throw std::domain_error("evaluate_lagrange: x outside [-1,1]");
  x = std::clamp(x, -1.0, 1.0);

  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dx = x - basis.nodes[j];
    if (dx == 0.0) return coeffs[j];
    const double t = basis.bary[j] / dx;
    num += t * coeffs[j];
    den += t;
  }
  return num / den;
}

double gauss_lobatto_integrate(const LobattoBasis1D& basis,
                               const std::function<double(double)>& f,
                               double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int j = 0; j < basis.num_nodes(); ++j)
    sum += basis.weights[j] * f(mid + half * basis.nodes[j]);
  return half * sum;
}

double composite_integrate(const LobattoBasis1D& basis,
                           const std::function<double(double)>& f,
                           int subintervals) {
  const double h = 2.0 / subintervals;
  double sum = 0.0;
  for (int k = 0; k < subintervals; ++k)
    sum += gauss_lobatto_integrate(basis, f, -1.0 + k * h, -1.0 + (k + 1) * h);
  return sum;
}

double quad_error_order_probe(const LobattoBasis1D& basis,
                              const std::function<double(double)>& f) {
  // Reference: a much finer composite rule of higher degree.
  const LobattoBasis1D fine = build_lobatto_basis(10);
  const double ref = composite_integrate(fine, f, 256);

  double prev_err = 0.0;
  double order = 0.0;
  for (int m = 4; m <= 64; m *= 2) {
    const double err = std::abs(composite_integrate(basis, f, m) - ref);
    if (m > 4 && prev_err > 1e-14 && err > 1e-14) order = std::log2(prev_err / err);
    prev_err = err;
  }
  return order;
}

}  // namespace esdg
