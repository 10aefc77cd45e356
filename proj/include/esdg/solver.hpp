#pragma once

#include <array>
#include <functional>
#include <vector>

#include "esdg/field.hpp"
#include "esdg/fluxes.hpp"

namespace esdg {

struct ShockCapturingConfig {
  bool enabled = false;
  double alpha_max = 0.002;
  double alpha_min = 0.0001;
};

struct SchemeConfig {
  int degree = 1;
  FluxChoice flux_choice{};
  GasModel gas{};
  ShockCapturingConfig shock_capturing{};
  AdmissibleBounds bounds{};
};

/// Totals reported per right-hand-side evaluation. Rates of the conserved
/// quantities vanish to roundoff on the periodic mesh. The entropy production
/// sign convention: production <= 0 means dissipation, so total_entropy_rate
/// and interface_entropy_production agree for the flux-differencing operator.
struct RhsDiagnostics {
  double total_mass_rate = 0.0;
  std::array<double, 2> total_momentum_rate{0.0, 0.0};
  double total_energy_rate = 0.0;
  double total_entropy_rate = 0.0;
  double interface_entropy_production = 0.0;
  double weak_bv_sum = 0.0;
};

/// Scratch buffers reused across evaluations; one instance per integrator.
class RhsWorkspace {
 public:
  std::vector<FluxPrim> prim;
  std::vector<double> face_flux_x;  // n^2 faces * (p+1) nodes * 4, oriented +x
  std::vector<double> face_flux_y;  // same, oriented +y
  std::vector<double> alpha;        // blending coefficient per element
  std::vector<double> fv_scratch;   // per-thread element rate buffers
  std::vector<double> elem_partial; // per-element diagnostic partials
  std::vector<double> face_partial; // per-face diagnostic partials
  std::vector<double> vinv;         // nodal-to-modal transform for the sensor
  int vinv_degree = -1;
};

/// Semidiscrete right-hand side: flux-differencing volume terms plus surface
/// coupling, with optional subcell FV blending. Writes dU/dt into `rate`
/// (same layout as `u`). Aborts with the element/node location if a nodal
/// state violates the configured bounds. Deterministic for any thread count.
void compute_rhs(const SolutionField& u, const SchemeConfig& cfg, SolutionField& rate,
                 RhsWorkspace& ws, RhsDiagnostics* diag = nullptr);

/// Convenience overload with its own workspace; always fills diagnostics.
RhsDiagnostics compute_rhs(const SolutionField& u, const SchemeConfig& cfg,
                           SolutionField& rate);

/// Flux-differencing approximation of div f(U) at the nodes (volume operator
/// only, no surface coupling). Used by the accuracy probes.
void volume_divergence(const SolutionField& u, const SchemeConfig& cfg, SolutionField& div);

/// Same operator with an arbitrary symmetric two-point flux, for operator
/// exactness tests.
void flux_differencing_volume_generic(
    const SolutionField& u,
    const std::function<FluxVector(const ConservedState&, const ConservedState&, int)>& flux,
    SolutionField& div);

struct AccuracyProbeResult {
  std::vector<double> errors;  ///< L1 error per resolution
  std::vector<double> orders;  ///< log2 ratios between consecutive resolutions
};

/// Measures the convergence order of the volume operator against the exact
/// divergence of a smooth manufactured field.
AccuracyProbeResult volume_term_accuracy_probe(
    const std::function<ConservedState(double, double)>& field,
    const std::function<std::array<double, 4>(double, double)>& exact_divergence,
    const SchemeConfig& cfg, const std::vector<int>& resolutions);

/// First-order LLF finite-volume rate on the (p+1)^2 Gauss-Lobatto subcells;
/// subcell widths are (h/2) w_j so the partition is conservative. Element
/// boundary subcells use the configured surface flux.
void subcell_fv_rhs(const SolutionField& u, const SchemeConfig& cfg, SolutionField& rate);

/// Modal-energy shock sensor: blending coefficient per element in
/// [0, alpha_max], zeroed below alpha_min.
std::vector<double> shock_sensor(const SolutionField& u, const SchemeConfig& cfg);

/// out_K = (1 - alpha_K) dg_K + alpha_K fv_K with explicit coefficients.
void blend_rates(const std::vector<double>& alpha, const SolutionField& dg_rate,
                 const SolutionField& fv_rate, SolutionField& out);

/// Sensor-driven blend of the two operators.
void blend_subcell_fv(const SolutionField& u, const SchemeConfig& cfg,
                      const SolutionField& dg_rate, const SolutionField& fv_rate,
                      SolutionField& out);

/// Interface entropy production sum((h/2) w_sigma ([[w]]^T f* - [[psi.n]]))
/// over all face quadrature points; nonpositive for entropy-stable surface
/// fluxes. Optionally returns the per-face contributions (x faces, then y).
double entropy_interface_production(const SolutionField& u, const SchemeConfig& cfg,
                                    std::vector<double>* per_face = nullptr);

/// Instantaneous weak-BV quantity sum((h^2/2) w_sigma lambda_sigma |[[U]]|_1).
double weak_bv_sum(const SolutionField& u, const SchemeConfig& cfg);

/// Largest nodal component spread within any single element (logged
/// diagnostic for the intra-element smoothness hypothesis; never enforced).
double max_intra_element_jump(const SolutionField& u);

}  // namespace esdg
