#include "esdg/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace esdg {

namespace {

// Local coordinate of target node a inside the owning coarse element when the
// fine element index leaves remainder rem under the refinement ratio r.
// Exactly +-1 at shared edges; the trace is taken from the owning element.
double nested_local_coord(int rem, int ratio, double xi) {
  return (2.0 * rem + xi + 1.0) / ratio - 1.0;
}

void check_nested(int coarse_n, int target_n) {
  if (target_n % coarse_n != 0)
    throw std::invalid_argument("transfer_to_mesh: target resolution must be a multiple of the source");
}

}  // namespace

const char* variable_name(Variable v) {
  switch (v) {
    case Variable::Density: return "density";
    case Variable::MomentumX: return "momentum_x";
    case Variable::MomentumY: return "momentum_y";
    case Variable::Energy: return "energy";
    default: return "entropy";
  }
}

NodalScalarField extract_variable(const SolutionField& u, Variable v, const GasModel& gas) {
  NodalScalarField f{u.mesh(), u.basis(), {}};
  f.values.resize(static_cast<std::size_t>(u.mesh().num_elements()) * u.nodes_per_element());
  for (int e = 0; e < u.mesh().num_elements(); ++e)
    for (int k = 0; k < u.nodes_per_element(); ++k) {
      const ConservedState s = u.state(e, k);
      double val = 0.0;
      switch (v) {
        case Variable::Density: val = s.rho; break;
        case Variable::MomentumX: val = s.m1; break;
        case Variable::MomentumY: val = s.m2; break;
        case Variable::Energy: val = s.E; break;
        case Variable::Entropy: val = math_entropy(s, gas); break;
      }
      f.values[static_cast<std::size_t>(e) * u.nodes_per_element() + k] = val;
    }
  return f;
}

NodalScalarField transfer_to_mesh(const NodalScalarField& coarse,
                                  const CartesianMesh2D& target_mesh,
                                  const LobattoBasis1D& target_basis) {
  check_nested(coarse.mesh.n(), target_mesh.n());
  const int ratio = target_mesh.n() / coarse.mesh.n();
  const int cn = coarse.basis.num_nodes();
  const int tn = target_basis.num_nodes();
  NodalScalarField out{target_mesh, target_basis, {}};
  out.values.resize(static_cast<std::size_t>(target_mesh.num_elements()) * tn * tn);

#pragma omp parallel for schedule(static)
  for (int e = 0; e < target_mesh.num_elements(); ++e) {
    const auto [ti, tj] = target_mesh.coords(e);
    const int ci = ti / ratio, cj = tj / ratio;
    const int ri = ti - ci * ratio, rj = tj - cj * ratio;
    const double* src =
        coarse.values.data() +
        static_cast<std::size_t>(coarse.mesh.index(ci, cj)) * cn * cn;
    std::vector<double> line(cn);
    for (int b = 0; b < tn; ++b) {
      const double eta = nested_local_coord(rj, ratio, target_basis.nodes[b]);
      for (int a = 0; a < tn; ++a) {
        const double xi = nested_local_coord(ri, ratio, target_basis.nodes[a]);
        for (int cb = 0; cb < cn; ++cb)
          line[cb] = evaluate_lagrange(coarse.basis,
                                       std::span<const double>(src + cb * cn, cn), xi);
        out.values[static_cast<std::size_t>(e) * tn * tn + b * tn + a] =
            evaluate_lagrange(coarse.basis, line, eta);
      }
    }
  }
  return out;
}

SolutionField transfer_to_mesh(const SolutionField& coarse, const CartesianMesh2D& target_mesh,
                               const LobattoBasis1D& target_basis) {
  check_nested(coarse.mesh().n(), target_mesh.n());
  SolutionField out(target_mesh, target_basis);
  // componentwise scalar transfer
  for (int m = 0; m < 4; ++m) {
    NodalScalarField comp{coarse.mesh(), coarse.basis(), {}};
    const std::size_t count =
        static_cast<std::size_t>(coarse.mesh().num_elements()) * coarse.nodes_per_element();
    comp.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) comp.values[k] = coarse.data()[k * 4 + m];
    const NodalScalarField t = transfer_to_mesh(comp, target_mesh, target_basis);
    for (std::size_t k = 0; k < t.values.size(); ++k) out.data()[k * 4 + m] = t.values[k];
  }
  return out;
}

double l1_norm(const NodalScalarField& f) {
  const int nn = f.basis.num_nodes();
  const double cell = f.mesh.h() * f.mesh.h() / 4.0;
  double sum = 0.0;
  for (int e = 0; e < f.mesh.num_elements(); ++e)
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a)
        sum += f.basis.weights[a] * f.basis.weights[b] *
               std::abs(f.values[static_cast<std::size_t>(e) * nn * nn + b * nn + a]);
  return cell * sum;
}

std::array<double, 4> l1_norm_field(const SolutionField& u) {
  const int nn = u.nodes_per_dir();
  const double cell = u.mesh().h() * u.mesh().h() / 4.0;
  std::array<double, 4> sum{};
  for (int e = 0; e < u.mesh().num_elements(); ++e)
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a) {
        const double w = u.basis().weights[a] * u.basis().weights[b];
        const double* q = u.node_ptr(e, b * nn + a);
        for (int m = 0; m < 4; ++m) sum[m] += w * std::abs(q[m]);
      }
  for (int m = 0; m < 4; ++m) sum[m] *= cell;
  return sum;
}

SolutionField cesaro_average(const std::vector<const SolutionField*>& fields) {
  if (fields.empty()) throw std::invalid_argument("cesaro_average: empty list");
  SolutionField out = *fields.front();
  for (std::size_t k = 1; k < fields.size(); ++k) {
    if (fields[k]->size() != out.size())
      throw std::invalid_argument("cesaro_average: fields live on different meshes");
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += fields[k]->data()[i];
  }
  const double inv = 1.0 / static_cast<double>(fields.size());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= inv;
  return out;
}

NodalScalarField cesaro_average(const std::vector<const NodalScalarField*>& fields) {
  if (fields.empty()) throw std::invalid_argument("cesaro_average: empty list");
  NodalScalarField out = *fields.front();
  for (std::size_t k = 1; k < fields.size(); ++k) {
    if (fields[k]->values.size() != out.values.size())
      throw std::invalid_argument("cesaro_average: fields live on different meshes");
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += fields[k]->values[i];
  }
  const double inv = 1.0 / static_cast<double>(fields.size());
  for (double& v : out.values) v *= inv;
  return out;
}

ErrorTable e1_e2_errors(const MeshFamilySolution& family, Variable v, const GasModel& gas) {
  const std::size_t count = family.members.size();
  if (count < 2) throw std::invalid_argument("e1_e2_errors: need at least two members");
  for (std::size_t k = 1; k < count; ++k)
    if (family.members[k].mesh().n() != 2 * family.members[k - 1].mesh().n())
      throw std::invalid_argument("e1_e2_errors: resolutions must double");

  const SolutionField& ref = family.members.back();
  std::vector<NodalScalarField> on_ref;
  on_ref.reserve(count);
  for (const SolutionField& member : family.members)
    on_ref.push_back(
        transfer_to_mesh(extract_variable(member, v, gas), ref.mesh(), ref.basis()));

  // running Cesaro means, the full-family mean is the E2 reference
  std::vector<NodalScalarField> means;
  means.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<const NodalScalarField*> prefix;
    for (std::size_t j = 0; j <= k; ++j) prefix.push_back(&on_ref[j]);
    means.push_back(cesaro_average(prefix));
  }

  auto l1_diff = [](const NodalScalarField& a, const NodalScalarField& b) {
    NodalScalarField d = a;
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
    return l1_norm(d);
  };

  ErrorTable table;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    table.resolutions.push_back(family.members[k].mesh().n());
    table.e1.push_back(l1_diff(on_ref[k], on_ref.back()));
    table.e2.push_back(l1_diff(means[k], means.back()));
    if (k == 0) {
      table.e1_order.push_back(std::nan(""));
      table.e2_order.push_back(std::nan(""));
    } else {
      table.e1_order.push_back(experimental_order(table.e1[k - 1], table.e1[k]));
      table.e2_order.push_back(experimental_order(table.e2[k - 1], table.e2[k]));
    }
  }
  return table;
}

ConsistencyResidual consistency_residual(const Trajectory& trajectory,
                                         const TestFunctionField& phi, const GasModel& gas) {
  if (!phi.value || !phi.dt || !phi.dx || !phi.dy)
    throw std::invalid_argument("consistency_residual: phi must provide value and derivatives");
  if (trajectory.times.size() < 2 || trajectory.times.size() != trajectory.states.size())
    throw std::invalid_argument("consistency_residual: need matching times and states");
  for (std::size_t k = 1; k < trajectory.times.size(); ++k)
    if (!(trajectory.times[k] > trajectory.times[k - 1]))
      throw std::invalid_argument("consistency_residual: times must increase");

  struct Integrands {
    double q_phi[4];    // rho phi, m1 phi1, m2 phi2, eta phi
    double a[4];        // q phi_t + flux : grad phi, per equation
  };

  auto evaluate = [&](double t, const SolutionField& u) {
    Integrands s{};
    const int nn = u.nodes_per_dir();
    const double cell = u.mesh().h() * u.mesh().h() / 4.0;
    for (int e = 0; e < u.mesh().num_elements(); ++e) {
      const auto [i, j] = u.mesh().coords(e);
      for (int b = 0; b < nn; ++b)
        for (int a = 0; a < nn; ++a) {
          const auto [x, y] = physical_node(u.mesh(), i, j, u.basis(), a, b);
          const double w = cell * u.basis().weights[a] * u.basis().weights[b];
          const ConservedState q = u.state(e, b * nn + a);
          const double p = pressure(q, gas);
          const double eta = math_entropy(q, gas);
          const double u1 = q.m1 / q.rho, u2 = q.m2 / q.rho;
          const double pv = phi.value(t, x, y);
          const double pt = phi.dt(t, x, y);
          const double px = phi.dx(t, x, y);
          const double py = phi.dy(t, x, y);
          s.q_phi[0] += w * q.rho * pv;
          s.q_phi[1] += w * q.m1 * pv;
          s.q_phi[2] += w * q.m2 * pv;
          s.q_phi[3] += w * eta * pv;
          s.a[0] += w * (q.rho * pt + q.m1 * px + q.m2 * py);
          s.a[1] += w * (q.m1 * pt + (q.m1 * u1 + p) * px + q.m1 * u2 * py);
          s.a[2] += w * (q.m2 * pt + q.m2 * u1 * px + (q.m2 * u2 + p) * py);
          s.a[3] += w * (eta * pt + eta * u1 * px + eta * u2 * py);
        }
    }
    return s;
  };

  std::vector<Integrands> snaps;
  snaps.reserve(trajectory.times.size());
  for (std::size_t k = 0; k < trajectory.times.size(); ++k)
    snaps.push_back(evaluate(trajectory.times[k], trajectory.states[k]));

  double time_integral[4] = {0, 0, 0, 0};
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    const double dt = trajectory.times[k] - trajectory.times[k - 1];
    for (int m = 0; m < 4; ++m)
      time_integral[m] += 0.5 * dt * (snaps[k - 1].a[m] + snaps[k].a[m]);
  }

  ConsistencyResidual r;
  r.continuity = (snaps.back().q_phi[0] - snaps.front().q_phi[0]) - time_integral[0];
  r.momentum_x = (snaps.back().q_phi[1] - snaps.front().q_phi[1]) - time_integral[1];
  r.momentum_y = (snaps.back().q_phi[2] - snaps.front().q_phi[2]) - time_integral[2];
  r.entropy_slack = (snaps.back().q_phi[3] - snaps.front().q_phi[3]) - time_integral[3];
  return r;
}

}  // namespace esdg
