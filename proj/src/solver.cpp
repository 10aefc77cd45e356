#include "esdg/solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace esdg {

namespace {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Deterministic pairwise reduction, independent of thread count.
double pairwise_sum(const double* v, std::size_t count, std::size_t stride) {
  if (count == 0) return 0.0;
  if (count == 1) return v[0];
  if (count <= 8) {
    double s = v[0];
    for (std::size_t k = 1; k < count; ++k) s += v[k * stride];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(v, half, stride) + pairwise_sum(v + half * stride, count - half, stride);
}

struct Ctx {
  int n;            // elements per direction
  int nn;           // nodes per direction, p+1
  int nne;          // nodes per element
  double h;
  double jac;       // 2/h, reference-map Jacobian of the divergence
  double inv_gm1;
  const LobattoBasis1D* basis;
  const SchemeConfig* cfg;
  std::vector<double> inv_w;  // 1/weights
};

Ctx make_ctx(const SolutionField& u, const SchemeConfig& cfg) {
  if (u.basis().degree != cfg.degree)
    throw std::invalid_argument("compute_rhs: config degree does not match field basis");
  Ctx c;
  c.n = u.mesh().n();
  c.nn = u.nodes_per_dir();
  c.nne = u.nodes_per_element();
  c.h = u.mesh().h();
  c.jac = 2.0 * c.n;
  c.inv_gm1 = 1.0 / (cfg.gas.gamma - 1.0);
  c.basis = &u.basis();
  c.cfg = &cfg;
  c.inv_w.resize(c.nn);
  for (int j = 0; j < c.nn; ++j) c.inv_w[j] = 1.0 / u.basis().weights[j];
  return c;
}

void build_prims(const SolutionField& u, const SchemeConfig& cfg, const Ctx& c,
                 std::vector<FluxPrim>& prim) {
  prim.resize(static_cast<std::size_t>(c.n) * c.n * c.nne);
  std::atomic<long> first_bad(-1);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < c.n * c.n; ++e) {
    for (int k = 0; k < c.nne; ++k) {
      const ConservedState s = u.state(e, k);
      if (!is_admissible(s, cfg.bounds, cfg.gas)) {
        const long idx = static_cast<long>(e) * c.nne + k;
        long cur = first_bad.load();
        while ((cur < 0 || idx < cur) && !first_bad.compare_exchange_weak(cur, idx)) {
        }
        continue;
      }
      prim[static_cast<std::size_t>(e) * c.nne + k] = make_flux_prim(s, cfg.gas);
    }
  }
  const long bad = first_bad.load();
  if (bad >= 0) {
    const int e = static_cast<int>(bad / c.nne);
    const int k = static_cast<int>(bad % c.nne);
    const auto [i, j] = u.mesh().coords(e);
    const ConservedState s = u.state(e, k);
    char msg[192];
    std::snprintf(msg, sizeof(msg),
                  "inadmissible state in element (%d,%d), node (%d,%d): rho=%.3e, E=%.3e",
                  i, j, k % c.nn, k / c.nn, s.rho, s.E);
    throw std::runtime_error(msg);
  }
}

template <class VolFlux>
void volume_element(const Ctx& c, const FluxPrim* ep, double* er, VolFlux vf) {
  const double* D = c.basis->diff.data();
  const int nn = c.nn;
  // x sweep, one row at a time
  for (int b = 0; b < nn; ++b) {
    const FluxPrim* row = ep + b * nn;
    double* rrow = er + b * nn * 4;
    for (int a = 0; a < nn; ++a) {
      const FluxVector fd = physical_flux(row[a], 1);
      const double cd = c.jac * 2.0 * D[a * nn + a];
      for (int m = 0; m < 4; ++m) rrow[a * 4 + m] -= cd * fd[m];
      for (int l = a + 1; l < nn; ++l) {
        const FluxVector f = vf(row[a], row[l], 1);
        const double ca = c.jac * 2.0 * D[a * nn + l];
        const double cl = c.jac * 2.0 * D[l * nn + a];
        for (int m = 0; m < 4; ++m) {
          rrow[a * 4 + m] -= ca * f[m];
          rrow[l * 4 + m] -= cl * f[m];
        }
      }
    }
  }
  // y sweep, one column at a time
  for (int a = 0; a < nn; ++a) {
    for (int b = 0; b < nn; ++b) {
      const FluxPrim& qb = ep[b * nn + a];
      const FluxVector fd = physical_flux(qb, 2);
      const double cd = c.jac * 2.0 * D[b * nn + b];
      double* rb = er + (b * nn + a) * 4;
      for (int m = 0; m < 4; ++m) rb[m] -= cd * fd[m];
      for (int l = b + 1; l < nn; ++l) {
        const FluxVector f = vf(qb, ep[l * nn + a], 2);
        const double cb = c.jac * 2.0 * D[b * nn + l];
        const double cl = c.jac * 2.0 * D[l * nn + b];
        double* rl = er + (l * nn + a) * 4;
        for (int m = 0; m < 4; ++m) {
          rb[m] -= cb * f[m];
          rl[m] -= cl * f[m];
        }
      }
    }
  }
}

template <class SurfFlux>
void compute_face_fluxes(const Ctx& c, const std::vector<FluxPrim>& prim,
                         std::vector<double>& fx, std::vector<double>& fy, SurfFlux sf) {
  const int n = c.n, nn = c.nn, nne = c.nne;
  fx.resize(static_cast<std::size_t>(n) * n * nn * 4);
  fy.resize(static_cast<std::size_t>(n) * n * nn * 4);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n * n; ++e) {
    const int i = e % n, j = e / n;
    // east face of (i,j): minus trace at a = nn-1, plus trace from (i+1,j) at a = 0
    const int er = j * n + (i + 1) % n;
    const FluxPrim* pl = prim.data() + static_cast<std::size_t>(e) * nne;
    const FluxPrim* pr = prim.data() + static_cast<std::size_t>(er) * nne;
    for (int k = 0; k < nn; ++k) {
      const FluxVector f = sf(pl[k * nn + (nn - 1)], pr[k * nn], 1);
      for (int m = 0; m < 4; ++m) fx[(static_cast<std::size_t>(e) * nn + k) * 4 + m] = f[m];
    }
    // north face of (i,j)
    const int en = ((j + 1) % n) * n + i;
    const FluxPrim* pn = prim.data() + static_cast<std::size_t>(en) * nne;
    for (int k = 0; k < nn; ++k) {
      const FluxVector f = sf(pl[(nn - 1) * nn + k], pn[k], 2);
      for (int m = 0; m < 4; ++m) fy[(static_cast<std::size_t>(e) * nn + k) * 4 + m] = f[m];
    }
  }
}

// Surface lifting: at a face node, tau/w_j ( f_phys - f* ), scaled by 2/h.
void apply_surface(const Ctx& c, const std::vector<FluxPrim>& prim,
                   const std::vector<double>& fx, const std::vector<double>& fy,
                   SolutionField& rate) {
  const int n = c.n, nn = c.nn, nne = c.nne;
  const double cw = c.jac * c.inv_w[0];       // both face weights are equal
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n * n; ++e) {
    const int i = e % n, j = e / n;
    const FluxPrim* ep = prim.data() + static_cast<std::size_t>(e) * nne;
    double* er = rate.node_ptr(e, 0);
    const std::size_t fe = static_cast<std::size_t>(e) * nn;
    const std::size_t fw = (static_cast<std::size_t>(j) * n + (i + n - 1) % n) * nn;
    const std::size_t fn = fe;
    const std::size_t fs = (static_cast<std::size_t>((j + n - 1) % n) * n + i) * nn;
    for (int k = 0; k < nn; ++k) {
      // east, tau = +1
      const FluxVector fphys_e = physical_flux(ep[k * nn + (nn - 1)], 1);
      double* re = er + (k * nn + (nn - 1)) * 4;
      for (int m = 0; m < 4; ++m) re[m] += cw * (fphys_e[m] - fx[(fe + k) * 4 + m]);
      // west, tau = -1
      const FluxVector fphys_w = physical_flux(ep[k * nn], 1);
      double* rw = er + (k * nn) * 4;
      for (int m = 0; m < 4; ++m) rw[m] -= cw * (fphys_w[m] - fx[(fw + k) * 4 + m]);
      // north, tau = +1
      const FluxVector fphys_n = physical_flux(ep[(nn - 1) * nn + k], 2);
      double* rn = er + ((nn - 1) * nn + k) * 4;
      for (int m = 0; m < 4; ++m) rn[m] += cw * (fphys_n[m] - fy[(fn + k) * 4 + m]);
      // south, tau = -1
      const FluxVector fphys_s = physical_flux(ep[k], 2);
      double* rs = er + k * 4;
      for (int m = 0; m < 4; ++m) rs[m] -= cw * (fphys_s[m] - fy[(fs + k) * 4 + m]);
    }
  }
}

// First-order LLF finite volume on the Lobatto subcells of one element.
// Element boundary subcells see the already-computed surface fluxes, which
// keeps the blended operator conservative.
void fv_element(const Ctx& c, const std::vector<FluxPrim>& prim, int e,
                const std::vector<double>& fx, const std::vector<double>& fy, double* er) {
  const int n = c.n, nn = c.nn, nne = c.nne;
  const int i = e % n, j = e / n;
  const FluxPrim* ep = prim.data() + static_cast<std::size_t>(e) * nne;
  const std::size_t fe = static_cast<std::size_t>(e) * nn;
  const std::size_t fw = (static_cast<std::size_t>(j) * n + (i + n - 1) % n) * nn;
  const std::size_t fn = fe;
  const std::size_t fs = (static_cast<std::size_t>((j + n - 1) % n) * n + i) * nn;

  for (int k = 0; k < nne * 4; ++k) er[k] = 0.0;
  std::array<FluxVector, 32> g;  // nn <= 21 interfaces + 1
  // x direction, row by row
  for (int b = 0; b < nn; ++b) {
    for (int m = 0; m < 4; ++m) {
      g[0][m] = fx[(fw + b) * 4 + m];
      g[nn][m] = fx[(fe + b) * 4 + m];
    }
    for (int a = 1; a < nn; ++a) g[a] = llf_flux(ep[b * nn + a - 1], ep[b * nn + a], {1, 1});
    for (int a = 0; a < nn; ++a) {
      const double coef = c.jac * c.inv_w[a];
      for (int m = 0; m < 4; ++m) er[(b * nn + a) * 4 + m] -= coef * (g[a + 1][m] - g[a][m]);
    }
  }
  // y direction, column by column
  for (int a = 0; a < nn; ++a) {
    for (int m = 0; m < 4; ++m) {
      g[0][m] = fy[(fs + a) * 4 + m];
      g[nn][m] = fy[(fn + a) * 4 + m];
    }
    for (int b = 1; b < nn; ++b) g[b] = llf_flux(ep[(b - 1) * nn + a], ep[b * nn + a], {2, 1});
    for (int b = 0; b < nn; ++b) {
      const double coef = c.jac * c.inv_w[b];
      for (int m = 0; m < 4; ++m) er[(b * nn + a) * 4 + m] -= coef * (g[b + 1][m] - g[b][m]);
    }
  }
}

// Nodal-to-modal transform V^{-1} for the orthonormal Legendre basis.
void build_vinv(const LobattoBasis1D& basis, std::vector<double>& vinv) {
  const int nn = basis.num_nodes();
  std::vector<double> a(static_cast<std::size_t>(nn) * 2 * nn, 0.0);  // [V | I]
  std::vector<double> leg(nn);
  for (int j = 0; j < nn; ++j) {
    const double x = basis.nodes[j];
    leg[0] = 1.0;
    if (nn > 1) leg[1] = x;
    for (int k = 2; k < nn; ++k)
      leg[k] = ((2.0 * k - 1.0) * x * leg[k - 1] - (k - 1.0) * leg[k - 2]) / k;
    for (int k = 0; k < nn; ++k) a[j * 2 * nn + k] = std::sqrt(k + 0.5) * leg[k];
    a[j * 2 * nn + nn + j] = 1.0;
  }
  // Gauss-Jordan with partial pivoting; nn <= 21
  for (int col = 0; col < nn; ++col) {
    int piv = col;
    for (int r = col + 1; r < nn; ++r)
      if (std::abs(a[r * 2 * nn + col]) > std::abs(a[piv * 2 * nn + col])) piv = r;
    if (piv != col)
      for (int k = 0; k < 2 * nn; ++k) std::swap(a[col * 2 * nn + k], a[piv * 2 * nn + k]);
    const double d = 1.0 / a[col * 2 * nn + col];
    for (int k = 0; k < 2 * nn; ++k) a[col * 2 * nn + k] *= d;
    for (int r = 0; r < nn; ++r) {
      if (r == col) continue;
      const double f = a[r * 2 * nn + col];
      if (f == 0.0) continue;
      for (int k = 0; k < 2 * nn; ++k) a[r * 2 * nn + k] -= f * a[col * 2 * nn + k];
    }
  }
  vinv.resize(static_cast<std::size_t>(nn) * nn);
  for (int r = 0; r < nn; ++r)
    for (int k = 0; k < nn; ++k) vinv[r * nn + k] = a[r * 2 * nn + nn + k];
}

double sensor_alpha(const Ctx& c, const FluxPrim* ep, const double* vinv,
                    double* scratch) {
  const int nn = c.nn;
  double* nodal = scratch;            // nn*nn
  double* tmp = scratch + c.nne;      // nn*nn
  double* modal = scratch + 2 * c.nne;
  for (int k = 0; k < c.nne; ++k) nodal[k] = ep[k].rho * ep[k].p;
  for (int k = 0; k < nn; ++k)
    for (int b = 0; b < nn; ++b) {
      double s = 0.0;
      for (int a = 0; a < nn; ++a) s += vinv[k * nn + a] * nodal[b * nn + a];
      tmp[k * nn + b] = s;
    }
  for (int k = 0; k < nn; ++k)
    for (int l = 0; l < nn; ++l) {
      double s = 0.0;
      for (int b = 0; b < nn; ++b) s += vinv[l * nn + b] * tmp[k * nn + b];
      modal[l * nn + k] = s;
    }
  double total = 0.0, high = 0.0;
  for (int l = 0; l < nn; ++l)
    for (int k = 0; k < nn; ++k) {
      const double m2 = modal[l * nn + k] * modal[l * nn + k];
      total += m2;
      if (l == nn - 1 || k == nn - 1) high += m2;
    }
  const double frac = total > 0.0 ? high / total : 0.0;
  const double degree = nn - 1.0;
  const double threshold = 0.5 * std::pow(10.0, -1.8 * std::pow(degree + 1.0, 0.25));
  const double sharpness = std::log(9999.0);
  double alpha = 1.0 / (1.0 + std::exp(-sharpness / threshold * (frac - threshold)));
  if (alpha < c.cfg->shock_capturing.alpha_min) alpha = 0.0;
  return std::min(alpha, c.cfg->shock_capturing.alpha_max);
}

struct RanochaF {
  double inv_gm1;
  FluxVector operator()(const FluxPrim& a, const FluxPrim& b, int d) const {
    return ranocha_flux(a, b, d, inv_gm1);
  }
};
struct ChandrashekarF {
  double inv_gm1;
  FluxVector operator()(const FluxPrim& a, const FluxPrim& b, int d) const {
    return chandrashekar_flux(a, b, d, inv_gm1);
  }
};
struct LlfF {
  FluxVector operator()(const FluxPrim& a, const FluxPrim& b, int d) const {
    return llf_flux(a, b, {d, 1});
  }
};

// Entropy variables from the cached primitive quantities; no extra logs.
inline std::array<double, 4> entropy_vars(const FluxPrim& q, double gamma, double inv_gm1) {
  const double s = (1.0 - gamma) * q.log_rho - q.log_rho_p;
  const double inv_p = 1.0 / q.p;
  return {gamma * inv_gm1 - s * inv_gm1 - 0.5 * q.rho * (q.u1 * q.u1 + q.u2 * q.u2) * inv_p,
          q.rho * q.u1 * inv_p, q.rho * q.u2 * inv_p, -q.rho * inv_p};
}

void reduce_diagnostics(const Ctx& c, const std::vector<FluxPrim>& prim,
                        const SolutionField& rate, RhsWorkspace& ws,
                        RhsDiagnostics& diag) {
  const int n = c.n, nn = c.nn, nne = c.nne;
  const double cell = c.h * c.h / 4.0;
  const double gamma = c.cfg->gas.gamma;
  ws.elem_partial.assign(static_cast<std::size_t>(n) * n * 5, 0.0);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n * n; ++e) {
    const FluxPrim* ep = prim.data() + static_cast<std::size_t>(e) * nne;
    const double* er = rate.node_ptr(e, 0);
    double part[5] = {0, 0, 0, 0, 0};
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a) {
        const int k = b * nn + a;
        const double w2 = c.basis->weights[a] * c.basis->weights[b];
        for (int m = 0; m < 4; ++m) part[m] += w2 * er[k * 4 + m];
        const auto wv = entropy_vars(ep[k], gamma, c.inv_gm1);
        part[4] += w2 * (wv[0] * er[k * 4] + wv[1] * er[k * 4 + 1] +
                         wv[2] * er[k * 4 + 2] + wv[3] * er[k * 4 + 3]);
      }
    for (int m = 0; m < 5; ++m) ws.elem_partial[static_cast<std::size_t>(e) * 5 + m] = part[m];
  }
  const std::size_t ne = static_cast<std::size_t>(n) * n;
  diag.total_mass_rate = cell * pairwise_sum(ws.elem_partial.data() + 0, ne, 5);
  diag.total_momentum_rate[0] = cell * pairwise_sum(ws.elem_partial.data() + 1, ne, 5);
  diag.total_momentum_rate[1] = cell * pairwise_sum(ws.elem_partial.data() + 2, ne, 5);
  diag.total_energy_rate = cell * pairwise_sum(ws.elem_partial.data() + 3, ne, 5);
  diag.total_entropy_rate = cell * pairwise_sum(ws.elem_partial.data() + 4, ne, 5);
}

// Per-face entropy production and weak-BV partials. Faces are visited in the
// +x orientation (minus = west element) and +y; jumps are plus minus minus.
void face_diagnostics(const Ctx& c, const std::vector<FluxPrim>& prim,
                      const std::vector<double>& fx, const std::vector<double>& fy,
                      RhsWorkspace& ws, double& production, double& weak_bv,
                      std::vector<double>* per_face) {
  const int n = c.n, nn = c.nn, nne = c.nne;
  const double gamma = c.cfg->gas.gamma;
  const double face_w = c.h / 2.0;
  const double bv_w = c.h * c.h / 2.0;
  ws.face_partial.assign(static_cast<std::size_t>(n) * n * 2 * 2, 0.0);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n * n; ++e) {
    const int i = e % n, j = e / n;
    for (int dir = 0; dir < 2; ++dir) {
      const int eminus = e;
      const int eplus = dir == 0 ? j * n + (i + 1) % n : ((j + 1) % n) * n + i;
      const std::vector<double>& ff = dir == 0 ? fx : fy;
      double prod = 0.0, bv = 0.0;
      for (int k = 0; k < nn; ++k) {
        const int node_minus = dir == 0 ? k * nn + (nn - 1) : (nn - 1) * nn + k;
        const int node_plus = dir == 0 ? k * nn : k;
        const FluxPrim& qm = prim[static_cast<std::size_t>(eminus) * nne + node_minus];
        const FluxPrim& qp = prim[static_cast<std::size_t>(eplus) * nne + node_plus];
        const auto wm = entropy_vars(qm, gamma, c.inv_gm1);
        const auto wp = entropy_vars(qp, gamma, c.inv_gm1);
        const double* f = &ff[(static_cast<std::size_t>(e) * nn + k) * 4];
        const double psi_m = dir == 0 ? qm.rho * qm.u1 : qm.rho * qm.u2;
        const double psi_p = dir == 0 ? qp.rho * qp.u1 : qp.rho * qp.u2;
        const double wk = c.basis->weights[k];
        prod += wk * ((wp[0] - wm[0]) * f[0] + (wp[1] - wm[1]) * f[1] +
                      (wp[2] - wm[2]) * f[2] + (wp[3] - wm[3]) * f[3] - (psi_p - psi_m));
        const double lam = std::max(qm.lam, qp.lam);
        const double djump = std::abs(qp.rho - qm.rho) +
                             std::abs(qp.rho * qp.u1 - qm.rho * qm.u1) +
                             std::abs(qp.rho * qp.u2 - qm.rho * qm.u2) +
                             std::abs(qp.E - qm.E);
        bv += wk * lam * djump;
      }
      ws.face_partial[(static_cast<std::size_t>(dir) * n * n + e) * 2] = face_w * prod;
      ws.face_partial[(static_cast<std::size_t>(dir) * n * n + e) * 2 + 1] = bv_w * bv;
    }
  }
  const std::size_t nf = static_cast<std::size_t>(n) * n * 2;
  production = pairwise_sum(ws.face_partial.data(), nf, 2);
  weak_bv = pairwise_sum(ws.face_partial.data() + 1, nf, 2);
  if (per_face) {
    per_face->resize(nf);
    for (std::size_t f = 0; f < nf; ++f) (*per_face)[f] = ws.face_partial[f * 2];
  }
}

template <class VolFlux>
void run_volume(const Ctx& c, const std::vector<FluxPrim>& prim, SolutionField& rate,
                VolFlux vf) {
  const int ne = c.n * c.n;
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    double* er = rate.node_ptr(e, 0);
    for (int k = 0; k < c.nne * 4; ++k) er[k] = 0.0;
    volume_element(c, prim.data() + static_cast<std::size_t>(e) * c.nne, er, vf);
  }
}

void compute_rhs_core(const SolutionField& u, const SchemeConfig& cfg, SolutionField& rate,
                      RhsWorkspace& ws, RhsDiagnostics* diag) {
  const Ctx c = make_ctx(u, cfg);
  if (rate.size() != u.size())
    throw std::invalid_argument("compute_rhs: rate buffer does not match the field");
  build_prims(u, cfg, c, ws.prim);

  if (cfg.flux_choice.volume_flux == VolumeFlux::Ranocha)
    run_volume(c, ws.prim, rate, RanochaF{c.inv_gm1});
  else
    run_volume(c, ws.prim, rate, ChandrashekarF{c.inv_gm1});

  if (cfg.flux_choice.surface_flux == SurfaceFlux::LocalLaxFriedrichs)
    compute_face_fluxes(c, ws.prim, ws.face_flux_x, ws.face_flux_y, LlfF{});
  else
    compute_face_fluxes(c, ws.prim, ws.face_flux_x, ws.face_flux_y, RanochaF{c.inv_gm1});

  apply_surface(c, ws.prim, ws.face_flux_x, ws.face_flux_y, rate);

  if (cfg.shock_capturing.enabled) {
    const int ne = c.n * c.n;
    if (ws.vinv_degree != cfg.degree) {
      build_vinv(*c.basis, ws.vinv);
      ws.vinv_degree = cfg.degree;
    }
    ws.alpha.resize(ne);
    const int nt = thread_count();
    ws.fv_scratch.resize(static_cast<std::size_t>(nt) * c.nne * 4);
    std::vector<double> sensor_scratch(static_cast<std::size_t>(nt) * c.nne * 3);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) {
#ifdef _OPENMP
      const int tid = omp_get_thread_num();
#else
      const int tid = 0;
#endif
      ws.alpha[e] = sensor_alpha(c, ws.prim.data() + static_cast<std::size_t>(e) * c.nne,
                                 ws.vinv.data(),
                                 sensor_scratch.data() + static_cast<std::size_t>(tid) * c.nne * 3);
      if (ws.alpha[e] > 0.0) {
        double* fv = ws.fv_scratch.data() + static_cast<std::size_t>(tid) * c.nne * 4;
        fv_element(c, ws.prim, e, ws.face_flux_x, ws.face_flux_y, fv);
        double* er = rate.node_ptr(e, 0);
        const double al = ws.alpha[e];
        for (int k = 0; k < c.nne * 4; ++k) er[k] = (1.0 - al) * er[k] + al * fv[k];
      }
    }
  }

  if (diag) {
    reduce_diagnostics(c, ws.prim, rate, ws, *diag);
    face_diagnostics(c, ws.prim, ws.face_flux_x, ws.face_flux_y, ws,
                     diag->interface_entropy_production, diag->weak_bv_sum, nullptr);
  }
}

}  // namespace

void compute_rhs(const SolutionField& u, const SchemeConfig& cfg, SolutionField& rate,
                 RhsWorkspace& ws, RhsDiagnostics* diag) {
  compute_rhs_core(u, cfg, rate, ws, diag);
}

RhsDiagnostics compute_rhs(const SolutionField& u, const SchemeConfig& cfg,
                           SolutionField& rate) {
  RhsWorkspace ws;
  RhsDiagnostics diag;
  compute_rhs_core(u, cfg, rate, ws, &diag);
  return diag;
}

void volume_divergence(const SolutionField& u, const SchemeConfig& cfg, SolutionField& div) {
  const Ctx c = make_ctx(u, cfg);
  RhsWorkspace ws;
  build_prims(u, cfg, c, ws.prim);
  if (cfg.flux_choice.volume_flux == VolumeFlux::Ranocha)
    run_volume(c, ws.prim, div, RanochaF{c.inv_gm1});
  else
    run_volume(c, ws.prim, div, ChandrashekarF{c.inv_gm1});
  for (std::size_t k = 0; k < div.size(); ++k) div.data()[k] = -div.data()[k];
}

void flux_differencing_volume_generic(
    const SolutionField& u,
    const std::function<FluxVector(const ConservedState&, const ConservedState&, int)>& flux,
    SolutionField& div) {
  const LobattoBasis1D& basis = u.basis();
  const int nn = basis.num_nodes();
  const double jac = 2.0 * u.mesh().n();
  for (std::size_t k = 0; k < div.size(); ++k) div.data()[k] = 0.0;
  for (int e = 0; e < u.mesh().num_elements(); ++e) {
    double* er = div.node_ptr(e, 0);
    for (int b = 0; b < nn; ++b)
      for (int a = 0; a < nn; ++a)
        for (int l = 0; l < nn; ++l) {
          const FluxVector f1 = flux(u.state(e, a, b), u.state(e, l, b), 1);
          const FluxVector f2 = flux(u.state(e, a, b), u.state(e, a, l), 2);
          for (int m = 0; m < 4; ++m)
            er[(b * nn + a) * 4 + m] +=
                jac * 2.0 * (basis.d(a, l) * f1[m] + basis.d(b, l) * f2[m]);
        }
  }
}

AccuracyProbeResult volume_term_accuracy_probe(
    const std::function<ConservedState(double, double)>& field,
    const std::function<std::array<double, 4>(double, double)>& exact_divergence,
    const SchemeConfig& cfg, const std::vector<int>& resolutions) {
  const LobattoBasis1D basis = build_lobatto_basis(cfg.degree);
  AccuracyProbeResult result;
  for (int n : resolutions) {
    const CartesianMesh2D mesh(n);
    SolutionField u(mesh, basis);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const auto [i, j] = mesh.coords(e);
      for (int b = 0; b <= cfg.degree; ++b)
        for (int a = 0; a <= cfg.degree; ++a) {
          const auto [x, y] = physical_node(mesh, i, j, basis, a, b);
          u.set_state(e, a, b, field(x, y));
        }
    }
    SolutionField div(mesh, basis);
    volume_divergence(u, cfg, div);
    const double cell = mesh.h() * mesh.h() / 4.0;
    double err = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const auto [i, j] = mesh.coords(e);
      for (int b = 0; b <= cfg.degree; ++b)
        for (int a = 0; a <= cfg.degree; ++a) {
          const auto [x, y] = physical_node(mesh, i, j, basis, a, b);
          const auto exact = exact_divergence(x, y);
          const double* d = div.node_ptr(e, u.node_index(a, b));
          const double w2 = basis.weights[a] * basis.weights[b];
          for (int m = 0; m < 4; ++m) err += cell * w2 * std::abs(d[m] - exact[m]);
        }
    }
    result.errors.push_back(err);
  }
  for (std::size_t k = 1; k < result.errors.size(); ++k)
    result.orders.push_back(std::log2(result.errors[k - 1] / result.errors[k]));
  return result;
}

void subcell_fv_rhs(const SolutionField& u, const SchemeConfig& cfg, SolutionField& rate) {
  const Ctx c = make_ctx(u, cfg);
  RhsWorkspace ws;
  build_prims(u, cfg, c, ws.prim);
  if (cfg.flux_choice.surface_flux == SurfaceFlux::LocalLaxFriedrichs)
    compute_face_fluxes(c, ws.prim, ws.face_flux_x, ws.face_flux_y, LlfF{});
  else
    compute_face_fluxes(c, ws.prim, ws.face_flux_x, ws.face_flux_y, RanochaF{c.inv_gm1});
#pragma omp parallel for schedule(static)
  for (int e = 0; e < c.n * c.n; ++e)
    fv_element(c, ws.prim, e, ws.face_flux_x, ws.face_flux_y, rate.node_ptr(e, 0));
}

std::vector<double> shock_sensor(const SolutionField& u, const SchemeConfig& cfg) {
  const Ctx c = make_ctx(u, cfg);
  RhsWorkspace ws;
  build_prims(u, cfg, c, ws.prim);
  build_vinv(*c.basis, ws.vinv);
  std::vector<double> alpha(c.n * c.n);
  std::vector<double> scratch(static_cast<std::size_t>(thread_count()) * c.nne * 3);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < c.n * c.n; ++e) {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    alpha[e] = sensor_alpha(c, ws.prim.data() + static_cast<std::size_t>(e) * c.nne,
                            ws.vinv.data(), scratch.data() + static_cast<std::size_t>(tid) * c.nne * 3);
  }
  return alpha;
}

void blend_rates(const std::vector<double>& alpha, const SolutionField& dg_rate,
                 const SolutionField& fv_rate, SolutionField& out) {
  const int ne = dg_rate.mesh().num_elements();
  if (static_cast<int>(alpha.size()) != ne)
    throw std::invalid_argument("blend_rates: one coefficient per element required");
  const int nv = dg_rate.nodes_per_element() * 4;
  for (int e = 0; e < ne; ++e) {
    const double al = alpha[e];
    const double* dg = dg_rate.node_ptr(e, 0);
    const double* fv = fv_rate.node_ptr(e, 0);
    double* o = out.node_ptr(e, 0);
    for (int k = 0; k < nv; ++k) o[k] = (1.0 - al) * dg[k] + al * fv[k];
  }
}

void blend_subcell_fv(const SolutionField& u, const SchemeConfig& cfg,
                      const SolutionField& dg_rate, const SolutionField& fv_rate,
                      SolutionField& out) {
  blend_rates(shock_sensor(u, cfg), dg_rate, fv_rate, out);
}

double entropy_interface_production(const SolutionField& u, const SchemeConfig& cfg,
                                    std::vector<double>* per_face) {
  const Ctx c = make_ctx(u, cfg);
  RhsWorkspace ws;
  build_prims(u, cfg, c, ws.prim);
  if (cfg.flux_choice.surface_flux == SurfaceFlux::LocalLaxFriedrichs)
    compute_face_fluxes(c, ws.prim, ws.face_flux_x, ws.face_flux_y, LlfF{});
  else
    compute_face_fluxes(c, ws.prim, ws.face_flux_x, ws.face_flux_y, RanochaF{c.inv_gm1});
  double production = 0.0, bv = 0.0;
  face_diagnostics(c, ws.prim, ws.face_flux_x, ws.face_flux_y, ws, production, bv, per_face);
  return production;
}

double weak_bv_sum(const SolutionField& u, const SchemeConfig& cfg) {
  const Ctx c = make_ctx(u, cfg);
  RhsWorkspace ws;
  build_prims(u, cfg, c, ws.prim);
  // fluxes are not needed for the jump sum, but the shared reducer reads them
  ws.face_flux_x.assign(static_cast<std::size_t>(c.n) * c.n * c.nn * 4, 0.0);
  ws.face_flux_y.assign(static_cast<std::size_t>(c.n) * c.n * c.nn * 4, 0.0);
  double production = 0.0, bv = 0.0;
  face_diagnostics(c, ws.prim, ws.face_flux_x, ws.face_flux_y, ws, production, bv, nullptr);
  return bv;
}

double max_intra_element_jump(const SolutionField& u) {
  double worst = 0.0;
  for (int e = 0; e < u.mesh().num_elements(); ++e) {
    for (int m = 0; m < 4; ++m) {
      double lo = u.node_ptr(e, 0)[m], hi = lo;
      for (int k = 1; k < u.nodes_per_element(); ++k) {
        const double v = u.node_ptr(e, k)[m];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, hi - lo);
    }
  }
  return worst;
}

}  // namespace esdg
