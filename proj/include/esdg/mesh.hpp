#pragma once

#include <stdexcept>
#include <utility>

#include "esdg/sbp.hpp"

namespace esdg {

enum class Face { West = 0, East = 1, South = 2, North = 3 };

inline Face opposite(Face f) {
  switch (f) {
    case Face::West: return Face::East;
    case Face::East: return Face::West;
    case Face::South: return Face::North;
    default: return Face::South;
  }
}

/// Uniform periodic n x n quad mesh over [0,1]^2. The edge length h = 1/n is
/// always derived from n so that h*n == 1 holds in the stored representation.
/// Elements are indexed (i, j) with 0 <= i, j < n, i running in x.
class CartesianMesh2D {
 public:
  explicit CartesianMesh2D(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("CartesianMesh2D: n must be >= 2");
  }

  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  int num_elements() const { return n_ * n_; }

  int index(int i, int j) const { return j * n_ + i; }
  std::pair<int, int> coords(int e) const { return {e % n_, e / n_}; }

  int wrap(int k) const {
    k %= n_;
    return k < 0 ? k + n_ : k;
  }

  int neighbor(int e, Face f) const {
    auto [i, j] = coords(e);
    switch (f) {
      case Face::West: return index(wrap(i - 1), j);
      case Face::East: return index(wrap(i + 1), j);
      case Face::South: return index(i, wrap(j - 1));
      default: return index(i, wrap(j + 1));
    }
  }

 private:
  int n_;
};

/// Physical coordinates of local node (a, b) of element (i, j) under the
/// affine reference map. Element corners land on multiples of 1/n exactly.
inline std::pair<double, double> physical_node(const CartesianMesh2D& mesh, int i, int j,
                                               const LobattoBasis1D& basis, int a, int b) {
  if (i < 0 || i >= mesh.n() || j < 0 || j >= mesh.n() || a < 0 || a > basis.degree ||
      b < 0 || b > basis.degree)
    throw std::out_of_range("physical_node: index out of range");
  const double x = (i + 0.5 * (basis.nodes[a] + 1.0)) / mesh.n();
  const double y = (j + 0.5 * (basis.nodes[b] + 1.0)) / mesh.n();
  return {x, y};
}

}  // namespace esdg
