#pragma once

#include <span>

#include "esdg/field.hpp"

namespace esdg {

struct LimiterReport {
  long elements_limited = 0;
  double min_theta = 1.0;     ///< smallest scaling factor applied anywhere
  double entropy_delta = 0.0; ///< quadrature-weighted entropy change, post - pre; never above roundoff
};

/// Quadrature-weighted average of one element's nodal states (weights
/// w_a w_b / 4, which sum to one).
ConservedState cell_average(std::span<const double> element_nodes, const LobattoBasis1D& basis);
ConservedState cell_average(const SolutionField& u, int element);

/// Linear-scaling positivity limiter, applied in place per element:
/// first the density values alone are pulled toward the cell average until
/// rho >= rho_min everywhere, then the full states are scaled by the largest
/// theta in [0,1] for which every nodal pressure stays >= p_min. Cell
/// averages are preserved exactly and the entropy never increases.
///
/// An inadmissible cell average is a hard error: it means the time-step
/// contract of the scheme was violated upstream.
LimiterReport positivity_limit(SolutionField& u, const AdmissibleBounds& bounds,
                               const GasModel& gas);

}  // namespace esdg
