#pragma once

#include <cstddef>
#include <vector>

#include "esdg/euler.hpp"
#include "esdg/mesh.hpp"
#include "esdg/sbp.hpp"

namespace esdg {

/// All nodal conserved states on a mesh: element-major, node index
/// (a + (p+1) b) within the element, the four components contiguous per node.
/// The x-sweep of the tensor-product kernels strides contiguously.
class SolutionField {
 public:
  SolutionField(const CartesianMesh2D& mesh, const LobattoBasis1D& basis)
      : mesh_(mesh),
        basis_(basis),
        data_(static_cast<std::size_t>(mesh.num_elements()) * (basis.degree + 1) *
                  (basis.degree + 1) * 4,
              0.0) {}

  const CartesianMesh2D& mesh() const { return mesh_; }
  const LobattoBasis1D& basis() const { return basis_; }

  int nodes_per_dir() const { return basis_.degree + 1; }
  int nodes_per_element() const { return nodes_per_dir() * nodes_per_dir(); }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  int node_index(int a, int b) const { return b * nodes_per_dir() + a; }

  double* node_ptr(int e, int node) {
    return data_.data() + (static_cast<std::size_t>(e) * nodes_per_element() + node) * 4;
  }
  const double* node_ptr(int e, int node) const {
    return data_.data() + (static_cast<std::size_t>(e) * nodes_per_element() + node) * 4;
  }

  ConservedState state(int e, int node) const {
    const double* q = node_ptr(e, node);
    return {q[0], q[1], q[2], q[3]};
  }
  ConservedState state(int e, int a, int b) const { return state(e, node_index(a, b)); }

  void set_state(int e, int node, const ConservedState& u) {
    double* q = node_ptr(e, node);
    q[0] = u.rho;
    q[1] = u.m1;
    q[2] = u.m2;
    q[3] = u.E;
  }
  void set_state(int e, int a, int b, const ConservedState& u) {
    set_state(e, node_index(a, b), u);
  }

  void fill(const ConservedState& u) {
    for (int e = 0; e < mesh_.num_elements(); ++e)
      for (int k = 0; k < nodes_per_element(); ++k) set_state(e, k, u);
  }

 private:
  CartesianMesh2D mesh_;
  LobattoBasis1D basis_;
  std::vector<double> data_;
};

}  // namespace esdg
