#include "resmg/solver.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace resmg {

void CycleConfig::validate() const {
  if (pre_smooth < 0 || post_smooth < 0 || pre_smooth + post_smooth == 0)
    throw std::invalid_argument("cycle: need at least one smoothing sweep");
  if (omega <= 0.0 || omega > 1.0)
    throw std::invalid_argument("cycle: jacobi damping must be in (0, 1]");
  if (coarse_iters < 1)
    throw std::invalid_argument("cycle: coarse PCG budget must be positive");
}

std::int64_t Mask::active_count(int ell) const {
  if (is_full()) return -1;
  switch (cls) {
    case NodeClass::faulty_interior: return sets->faulty_count[ell];
    case NodeClass::healthy_interior: return sets->healthy_count[ell];
    case NodeClass::interface: return sets->interface_count[ell];
  }
  return 0;
}

MultigridWorkspace::MultigridWorkspace(std::span<const LevelSystem> systems) {
  u.reserve(systems.size());
  f.reserve(systems.size());
  r.reserve(systems.size());
  sum.reserve(systems.size());
  for (const LevelSystem& sys : systems) {
    u.emplace_back(sys.size());
    f.emplace_back(sys.size());
    r.emplace_back(sys.size());
    sum.emplace_back(sys.size());
  }
}

namespace {

bool active(const Mask& mask, MaskSpan lab, std::int64_t idx) {
  return mask.is_full() || lab[idx] == mask.cls;
}

void jacobi_sweep(const LevelSystem& sys, GridVector& u,
                  std::span<const double> f, double omega, const Mask& mask,
                  GridVector& scratch) {
  std::span<double> r(scratch);
  if (mask.is_full())
    residual(sys, u, f, r);
  else
    residual_masked(sys, u, f, r, mask.level(sys.grid.level), mask.cls);
  const double scale = omega / sys.diagonal();
  MaskSpan lab = mask.is_full() ? MaskSpan{} : mask.level(sys.grid.level);
  for (std::int64_t i = 0; i < sys.size(); ++i)
    if (active(mask, lab, i)) u[i] += scale * r[i];
}

// One Gauss-Seidel pass in lexicographic order over nodes of the given
// parity ((i+j+k) mod 2), or over all nodes if parity < 0.
void gs_pass(const LevelSystem& sys, GridVector& u, std::span<const double> f,
             int parity, const Mask& mask) {
  const int n = sys.grid.interior_per_axis();
  const double h = sys.grid.spacing;
  const double inv_diag_w = 1.0 / LevelSystem::center_weight;
  MaskSpan lab = mask.is_full() ? MaskSpan{} : mask.level(sys.grid.level);
  constexpr double we = LevelSystem::edge_weight;
  constexpr double wc = LevelSystem::corner_weight;

  std::int64_t idx = 0;
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a, ++idx) {
        if (parity >= 0 && ((a + b + c + 3) & 1) != parity) continue;
        if (!active(mask, lab, idx)) continue;
        // 12 edge + 8 corner neighbors; missing ones are boundary zeros.
        double s = 0;
        const int a0 = a > 0 ? -1 : 0, a1 = a < n - 1 ? 1 : 0;
        const int b0 = b > 0 ? -1 : 0, b1 = b < n - 1 ? 1 : 0;
        const int c0 = c > 0 ? -1 : 0, c1 = c < n - 1 ? 1 : 0;
        for (int dc = c0; dc <= c1; ++dc)
          for (int db = b0; db <= b1; ++db)
            for (int da = a0; da <= a1; ++da) {
              const int nz = (da != 0) + (db != 0) + (dc != 0);
              if (nz < 2) continue;
              const double w = nz == 2 ? we : wc;
              s += w * u[idx + (static_cast<std::int64_t>(dc) * n + db) * n + da];
            }
        u[idx] = (f[idx] / h - s) * inv_diag_w;
      }
}

void smooth_once(const LevelSystem& sys, GridVector& u,
                 std::span<const double> f, const CycleConfig& cfg,
                 const Mask& mask, GridVector& scratch) {
  switch (cfg.smoother) {
    case SmootherKind::damped_jacobi:
      jacobi_sweep(sys, u, f, cfg.omega, mask, scratch);
      break;
    case SmootherKind::red_black_gauss_seidel:
      gs_pass(sys, u, f, 0, mask);
      gs_pass(sys, u, f, 1, mask);
      break;
    case SmootherKind::lexicographic_gauss_seidel:
      gs_pass(sys, u, f, -1, mask);
      break;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void smooth(const LevelSystem& sys, GridVector& u, std::span<const double> f,
            const CycleConfig& cfg, int sweeps, const Mask& mask,
            GridVector& scratch) {
  for (int s = 0; s < sweeps; ++s) smooth_once(sys, u, f, cfg, mask, scratch);
}

int pcg_coarse(const LevelSystem& sys, std::span<const double> f,
               GridVector& u, int iters, const Mask& mask) {
  const std::int64_t n = sys.size();
  u.assign(n, 0.0);
  if (!mask.is_full() && mask.active_count(sys.grid.level) == 0) return 0;

  MaskSpan lab = mask.is_full() ? MaskSpan{} : mask.level(sys.grid.level);
  GridVector r(n), z(n), p(n), q(n);
  for (std::int64_t i = 0; i < n; ++i)
    r[i] = active(mask, lab, i) ? f[i] : 0.0;

  const double f_norm = std::sqrt(dot(r, r));
  if (f_norm == 0.0) return 0;
  const double stop = 1e-15 * f_norm;

  const double inv_diag = 1.0 / sys.diagonal();
  for (std::int64_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
  p = z;
  double rz = dot(r, z);

  int it = 0;
  while (it < iters) {
    if (mask.is_full())
      apply_operator(sys, p, q);
    else
      apply_operator_masked(sys, p, q, lab, mask.cls);
    const double pq = dot(p, q);
    if (pq <= 0.0)
      throw std::runtime_error("pcg: breakdown, operator not SPD on the active set");
    const double alpha = rz / pq;
    for (std::int64_t i = 0; i < n; ++i) u[i] += alpha * p[i];
    for (std::int64_t i = 0; i < n; ++i) r[i] -= alpha * q[i];
    ++it;
    if (std::sqrt(dot(r, r)) < stop) break;
    for (std::int64_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

namespace {

// Shared descent: smooth, form the masked residual, restrict it one
// level.  Corrections on coarser levels start from zero.
void descend(std::span<const LevelSystem> systems, MultigridWorkspace& ws,
             GridVector& u_fine, std::span<const double> f_fine,
             const CycleConfig& cfg, const Mask& mask, int level) {
  const LevelSystem& sys = systems[level];
  smooth(sys, u_fine, f_fine, cfg, cfg.pre_smooth, mask, ws.r[level]);
  if (mask.is_full())
    residual(sys, u_fine, f_fine, ws.r[level]);
  else
    residual_masked(sys, u_fine, f_fine, ws.r[level], mask.level(level),
                    mask.cls);
  const TransferPair tp{systems[level - 1].grid, sys.grid};
  if (mask.is_full())
    restrict_to_coarse(tp, ws.r[level], ws.f[level - 1]);
  else
    restrict_to_coarse_masked(tp, ws.r[level], ws.f[level - 1],
                              mask.level(level - 1), mask.cls);
}

void correct(std::span<const LevelSystem> systems, MultigridWorkspace& ws,
             GridVector& u_fine, const Mask& mask, int level) {
  const TransferPair tp{systems[level - 1].grid, systems[level].grid};
  if (mask.is_full())
    prolongate_add(tp, ws.u[level - 1], u_fine);
  else
    prolongate_add_masked(tp, ws.u[level - 1], u_fine, mask.level(level),
                          mask.cls);
}

}  // namespace

void v_cycle(std::span<const LevelSystem> systems, MultigridWorkspace& ws,
             GridVector& u, std::span<const double> f, const CycleConfig& cfg,
             const Mask& mask) {
  const int top = static_cast<int>(systems.size()) - 1;
  for (int level = top; level >= 1; --level) {
    GridVector& ul = level == top ? u : ws.u[level];
    std::span<const double> fl = level == top ? f : std::span<const double>(ws.f[level]);
    descend(systems, ws, ul, fl, cfg, mask, level);
    if (level - 1 > 0) ws.u[level - 1].assign(systems[level - 1].size(), 0.0);
  }
  pcg_coarse(systems[0], ws.f[0], ws.u[0], cfg.coarse_iters, mask);
  for (int level = 1; level <= top; ++level) {
    GridVector& ul = level == top ? u : ws.u[level];
    std::span<const double> fl = level == top ? f : std::span<const double>(ws.f[level]);
    correct(systems, ws, ul, mask, level);
    smooth(systems[level], ul, fl, cfg, cfg.post_smooth, mask, ws.r[level]);
  }
}

void half_cycle_down(std::span<const LevelSystem> systems,
                     MultigridWorkspace& ws, GridVector& u,
                     std::span<const double> f, const CycleConfig& cfg,
                     const Mask& mask) {
  const int top = static_cast<int>(systems.size()) - 1;
  for (int level = top; level >= 1; --level) {
    GridVector& ul = level == top ? u : ws.u[level];
    std::span<const double> fl = level == top ? f : std::span<const double>(ws.f[level]);
    descend(systems, ws, ul, fl, cfg, mask, level);
    if (level - 1 > 0) ws.u[level - 1].assign(systems[level - 1].size(), 0.0);
  }
  pcg_coarse(systems[0], ws.f[0], ws.u[0], cfg.coarse_iters, mask);
  for (int level = 1; level <= top; ++level) {
    GridVector& ul = level == top ? u : ws.u[level];
    correct(systems, ws, ul, mask, level);
  }
}

}  // namespace resmg
