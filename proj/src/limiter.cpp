#include "esdg/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace esdg {

namespace {

double node_pressure(const double* q, double gm1) {
  return gm1 * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
}

struct ElementOutcome {
  double theta = 1.0;
  bool limited = false;
  bool entropy_tracked = false;  // pre-states admissible enough for eta to exist
  double eta_pre = 0.0;
  double eta_post = 0.0;
  bool bad_average = false;
};

// The scaled state along the ray toward the average.
void scaled_state(const double* q, const double* avg, double theta, double* out) {
  for (int m = 0; m < 4; ++m) out[m] = avg[m] + theta * (q[m] - avg[m]);
}

double weighted_entropy(const double* nodes, int nne, const double* w2d, double gamma) {
  double sum = 0.0;
  for (int k = 0; k < nne; ++k) {
    const double* q = nodes + k * 4;
    const double p = (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
    const double s = std::log(p) - gamma * std::log(q[0]);
    sum += w2d[k] * (-q[0] * s / (gamma - 1.0));
  }
  return sum;
}

ElementOutcome limit_element(double* nodes, int nn, const double* w2d,
                             const AdmissibleBounds& bounds, const GasModel& gas) {
  const int nne = nn * nn;
  const double gm1 = gas.gamma - 1.0;
  ElementOutcome out;

  double avg[4] = {0, 0, 0, 0};
  for (int k = 0; k < nne; ++k)
    for (int m = 0; m < 4; ++m) avg[m] += w2d[k] * nodes[k * 4 + m];

  double rho_min_node = nodes[0];
  double p_min_node = std::numeric_limits<double>::infinity();
  bool all_positive = true;
  for (int k = 0; k < nne; ++k) {
    rho_min_node = std::min(rho_min_node, nodes[k * 4]);
    if (nodes[k * 4] > 0.0) {
      const double p = node_pressure(nodes + k * 4, gm1);
      p_min_node = std::min(p_min_node, p);
      if (!(p > 0.0)) all_positive = false;
    } else {
      all_positive = false;
    }
  }
  if (rho_min_node >= bounds.rho_min && p_min_node >= bounds.p_min) return out;

  const double avg_p = avg[0] > 0.0 ? node_pressure(avg, gm1) : -1.0;
  if (!(avg[0] >= bounds.rho_min) || !(avg_p >= bounds.p_min)) {
    out.bad_average = true;
    return out;
  }

  out.limited = true;
  // Entropy bookkeeping only makes sense when eta is defined pre-limit.
  out.entropy_tracked = all_positive;
  if (out.entropy_tracked) out.eta_pre = weighted_entropy(nodes, nne, w2d, gas.gamma);

  // Stage 1: the density floor. The scaling acts on the full state vector so
  // the convexity argument for the entropy applies; the density component
  // still lands exactly on the floor at the worst node.
  if (rho_min_node < bounds.rho_min) {
    const double theta = (avg[0] - bounds.rho_min) / (avg[0] - rho_min_node);
    out.theta = std::min(out.theta, theta);
    for (int k = 0; k < nne; ++k) {
      for (int m = 0; m < 4; ++m)
        nodes[k * 4 + m] = avg[m] + theta * (nodes[k * 4 + m] - avg[m]);
      double& rho = nodes[k * 4];
      if (rho < bounds.rho_min) rho = bounds.rho_min;  // roundoff guard, sub-ulp
    }
  }

  // Stage 2: full-state scaling for the pressure floor. Pressure is concave
  // along the ray, so the admissible thetas form an interval containing 0;
  // bisection keeps the largest known-admissible value.
  bool all_ok = true;
  double trial[4];
  for (int k = 0; k < nne; ++k) {
    if (node_pressure(nodes + k * 4, gm1) < bounds.p_min) {
      all_ok = false;
      break;
    }
  }
  if (!all_ok) {
    auto admissible_at = [&](double theta) {
      for (int k = 0; k < nne; ++k) {
        scaled_state(nodes + k * 4, avg, theta, trial);
        if (!(trial[0] >= bounds.rho_min) || !(node_pressure(trial, gm1) >= bounds.p_min))
          return false;
      }
      return true;
    };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (admissible_at(mid))
        lo = mid;
      else
        hi = mid;
    }
    out.theta = std::min(out.theta, lo);
    for (int k = 0; k < nne; ++k) {
      scaled_state(nodes + k * 4, avg, lo, trial);
      for (int m = 0; m < 4; ++m) nodes[k * 4 + m] = trial[m];
    }
  }

  if (out.entropy_tracked) out.eta_post = weighted_entropy(nodes, nne, w2d, gas.gamma);
  return out;
}

}  // namespace

ConservedState cell_average(std::span<const double> element_nodes,
                            const LobattoBasis1D& basis) {
  const int nn = basis.num_nodes();
  if (static_cast<int>(element_nodes.size()) != nn * nn * 4)
    throw std::invalid_argument("cell_average: node data size mismatch");
  double avg[4] = {0, 0, 0, 0};
  for (int b = 0; b < nn; ++b)
    for (int a = 0; a < nn; ++a) {
      const double w = 0.25 * basis.weights[a] * basis.weights[b];
      for (int m = 0; m < 4; ++m) avg[m] += w * element_nodes[(b * nn + a) * 4 + m];
    }
  return {avg[0], avg[1], avg[2], avg[3]};
}

ConservedState cell_average(const SolutionField& u, int element) {
  return cell_average(std::span<const double>(u.node_ptr(element, 0),
                                              static_cast<std::size_t>(u.nodes_per_element()) * 4),
                      u.basis());
}

LimiterReport positivity_limit(SolutionField& u, const AdmissibleBounds& bounds,
                               const GasModel& gas) {
  const int nn = u.nodes_per_dir();
  const int ne = u.mesh().num_elements();
  std::vector<double> w2d(static_cast<std::size_t>(nn) * nn);
  for (int b = 0; b < nn; ++b)
    for (int a = 0; a < nn; ++a)
      w2d[b * nn + a] = 0.25 * u.basis().weights[a] * u.basis().weights[b];

  std::vector<ElementOutcome> outcomes(ne);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e)
    outcomes[e] = limit_element(u.node_ptr(e, 0), nn, w2d.data(), bounds, gas);

  LimiterReport report;
  const double cell = u.mesh().h() * u.mesh().h();
  for (int e = 0; e < ne; ++e) {
    const ElementOutcome& o = outcomes[e];
    if (o.bad_average) {
      const auto [i, j] = u.mesh().coords(e);
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "positivity_limit: inadmissible cell average in element (%d,%d)", i, j);
      throw std::runtime_error(msg);
    }
    if (o.limited) {
      ++report.elements_limited;
      report.min_theta = std::min(report.min_theta, o.theta);
      if (o.entropy_tracked) report.entropy_delta += cell * (o.eta_post - o.eta_pre);
    }
  }
  return report;
}

}  // namespace esdg
