#include "resmg/operators.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

#include "resmg/rng.hpp"

namespace resmg {

namespace {

struct Tap {
  int di, dj, dk;
  double w;  // dimensionless stencil weight
};

// The 20 nonzero off-diagonal taps: 12 edge neighbors and 8 corner
// neighbors.  Face neighbors carry weight 0 in this discretization.
constexpr std::array<Tap, 20> off_diag_taps() {
  std::array<Tap, 20> taps{};
  int t = 0;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int nz = (di != 0) + (dj != 0) + (dk != 0);
        if (nz == 2) taps[t++] = {di, dj, dk, LevelSystem::edge_weight};
        if (nz == 3) taps[t++] = {di, dj, dk, LevelSystem::corner_weight};
      }
  return taps;
}

constexpr std::array<Tap, 20> kTaps = off_diag_taps();

// Row sum of off-diagonal neighbor values around local node (a,b,c),
// local coordinates in [0, n).  Bulk rows use precomputed linear
// offsets; shell rows fall back to bounds checks (missing neighbors are
// eliminated boundary nodes with value zero).
template <class Body>
void for_each_row(int n, Body&& body) {
  std::int64_t idx = 0;
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a, ++idx) body(a, b, c, idx);
}

double gather_checked(const double* v, int n, int a, int b, int c) {
  double s = 0;
  for (const Tap& t : kTaps) {
    const int aa = a + t.di, bb = b + t.dj, cc = c + t.dk;
    if (aa < 0 || bb < 0 || cc < 0 || aa >= n || bb >= n || cc >= n) continue;
    s += t.w * v[(static_cast<std::int64_t>(cc) * n + bb) * n + aa];
  }
  return s;
}

double gather_bulk(const double* v, std::int64_t idx,
                   const std::array<std::int64_t, 20>& off) {
  double s = 0;
  for (int t = 0; t < 20; ++t) s += kTaps[t].w * v[idx + off[t]];
  return s;
}

std::array<std::int64_t, 20> linear_offsets(int n) {
  std::array<std::int64_t, 20> off{};
  for (int t = 0; t < 20; ++t)
    off[t] = (static_cast<std::int64_t>(kTaps[t].dk) * n + kTaps[t].dj) * n +
             kTaps[t].di;
  return off;
}

enum class RowOp { apply, residual };

template <RowOp Op, bool Masked>
void stencil_pass(const LevelSystem& sys, const double* u, const double* f,
                  double* out, const NodeClass* mask, NodeClass cls) {
  const int n = sys.grid.interior_per_axis();
  const double h = sys.grid.spacing;
  const double diag = LevelSystem::center_weight;
  const auto off = linear_offsets(n);
  for_each_row(n, [&](int a, int b, int c, std::int64_t idx) {
    if constexpr (Masked) {
      if (mask[idx] != cls) {
        out[idx] = 0;
        return;
      }
    }
    const bool bulk = a > 0 && b > 0 && c > 0 && a < n - 1 && b < n - 1 && c < n - 1;
    const double s = bulk ? gather_bulk(u, idx, off) : gather_checked(u, n, a, b, c);
    const double av = h * (diag * u[idx] + s);
    if constexpr (Op == RowOp::apply)
      out[idx] = av;
    else
      out[idx] = f[idx] - av;
  });
}

// Unmasked rows go line by line: for a fixed (b,c) the 20 neighbor
// streams are contiguous in the x direction, so the tap loops vectorize.
// Boundary-adjacent lines and line ends use the checked per-node path.
template <RowOp Op>
void stencil_pass_full(const LevelSystem& sys, const double* u,
                       const double* f, double* out) {
  const int n = sys.grid.interior_per_axis();
  const double h = sys.grid.spacing;
  const double diag = LevelSystem::center_weight;
  const auto off = linear_offsets(n);

  auto checked = [&](int a, int b, int c, std::int64_t idx) {
    const double av = h * (diag * u[idx] + gather_checked(u, n, a, b, c));
    out[idx] = Op == RowOp::apply ? av : f[idx] - av;
  };

  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b) {
      const std::int64_t row = (static_cast<std::int64_t>(c) * n + b) * n;
      if (n <= 2 || b == 0 || c == 0 || b == n - 1 || c == n - 1) {
        for (int a = 0; a < n; ++a) checked(a, b, c, row + a);
        continue;
      }
      checked(0, b, c, row);
      // Same accumulation order as the gather paths (taps first, then
      // the diagonal), so bulk, shell and masked rows round identically.
      double* __restrict o = out + row;
      for (int a = 1; a < n - 1; ++a) o[a] = 0.0;
      for (int t = 0; t < 20; ++t) {
        const double w = kTaps[t].w;
        const double* __restrict src = u + row + off[t];
        for (int a = 1; a < n - 1; ++a) o[a] += w * src[a];
      }
      if constexpr (Op == RowOp::apply) {
        for (int a = 1; a < n - 1; ++a)
          o[a] = h * (diag * u[row + a] + o[a]);
      } else {
        for (int a = 1; a < n - 1; ++a)
          o[a] = f[row + a] - h * (diag * u[row + a] + o[a]);
      }
      checked(n - 1, b, c, row + n - 1);
    }
}

}  // namespace

std::vector<LevelSystem> build_level_systems(const MeshHierarchy& mesh) {
  std::vector<LevelSystem> systems;
  systems.reserve(mesh.levels.size());
  for (const LevelGrid& g : mesh.levels) systems.push_back(LevelSystem{g});
  return systems;
}

void apply_operator(const LevelSystem& sys, std::span<const double> v,
                    std::span<double> out) {
  assert(v.size() == out.size());
  assert(v.data() != out.data());
  stencil_pass_full<RowOp::apply>(sys, v.data(), nullptr, out.data());
}

void apply_operator_masked(const LevelSystem& sys, std::span<const double> v,
                           std::span<double> out, MaskSpan mask,
                           NodeClass cls) {
  stencil_pass<RowOp::apply, true>(sys, v.data(), nullptr, out.data(),
                                   mask.data(), cls);
}

void residual(const LevelSystem& sys, std::span<const double> u,
              std::span<const double> f, std::span<double> out) {
  assert(u.data() != out.data());
  stencil_pass_full<RowOp::residual>(sys, u.data(), f.data(), out.data());
}

void residual_masked(const LevelSystem& sys, std::span<const double> u,
                     std::span<const double> f, std::span<double> out,
                     MaskSpan mask, NodeClass cls) {
  stencil_pass<RowOp::residual, true>(sys, u.data(), f.data(), out.data(),
                                      mask.data(), cls);
}

namespace {

// Coarse parents of fine index fi: even fine coordinates coincide with a
// coarse node (weight 1), odd ones average the two coarse neighbors.
struct AxisParents {
  int idx[2];
  double w[2];
  int count;
};

AxisParents parents(int fi, int coarse_cells) {
  AxisParents p{};
  if (fi % 2 == 0) {
    p.count = 1;
    p.idx[0] = fi / 2;
    p.w[0] = 1.0;
  } else {
    p.count = 2;
    p.idx[0] = fi / 2;
    p.idx[1] = fi / 2 + 1;
    p.w[0] = p.w[1] = 0.5;
  }
  // Eliminated coarse boundary nodes contribute zero.
  int kept = 0;
  for (int t = 0; t < p.count; ++t)
    if (p.idx[t] >= 1 && p.idx[t] <= coarse_cells - 1) {
      p.idx[kept] = p.idx[t];
      p.w[kept] = p.w[t];
      ++kept;
    }
  p.count = kept;
  return p;
}

template <class Visit>
void for_each_fine_node(const TransferPair& tp, Visit&& visit) {
  const int mf = tp.fine.cells;
  const int mc = tp.coarse.cells;
  std::int64_t idx = 0;
  for (int k = 1; k < mf; ++k) {
    const AxisParents pk = parents(k, mc);
    for (int j = 1; j < mf; ++j) {
      const AxisParents pj = parents(j, mc);
      for (int i = 1; i < mf; ++i, ++idx) {
        const AxisParents pi = parents(i, mc);
        visit(idx, pi, pj, pk);
      }
    }
  }
}

}  // namespace

void prolongate(const TransferPair& tp, std::span<const double> coarse,
                std::span<double> fine) {
  const LevelGrid& cg = tp.coarse;
  for_each_fine_node(tp, [&](std::int64_t idx, const AxisParents& pi,
                             const AxisParents& pj, const AxisParents& pk) {
    double s = 0;
    for (int c = 0; c < pk.count; ++c)
      for (int b = 0; b < pj.count; ++b)
        for (int a = 0; a < pi.count; ++a)
          s += pk.w[c] * pj.w[b] * pi.w[a] *
               coarse[cg.index(pi.idx[a], pj.idx[b], pk.idx[c])];
    fine[idx] = s;
  });
}

void prolongate_add(const TransferPair& tp, std::span<const double> coarse,
                    std::span<double> fine) {
  const LevelGrid& cg = tp.coarse;
  for_each_fine_node(tp, [&](std::int64_t idx, const AxisParents& pi,
                             const AxisParents& pj, const AxisParents& pk) {
    double s = 0;
    for (int c = 0; c < pk.count; ++c)
      for (int b = 0; b < pj.count; ++b)
        for (int a = 0; a < pi.count; ++a)
          s += pk.w[c] * pj.w[b] * pi.w[a] *
               coarse[cg.index(pi.idx[a], pj.idx[b], pk.idx[c])];
    fine[idx] += s;
  });
}

void prolongate_add_masked(const TransferPair& tp,
                           std::span<const double> coarse,
                           std::span<double> fine, MaskSpan mask,
                           NodeClass cls) {
  const LevelGrid& cg = tp.coarse;
  for_each_fine_node(tp, [&](std::int64_t idx, const AxisParents& pi,
                             const AxisParents& pj, const AxisParents& pk) {
    if (mask[idx] != cls) return;
    double s = 0;
    for (int c = 0; c < pk.count; ++c)
      for (int b = 0; b < pj.count; ++b)
        for (int a = 0; a < pi.count; ++a)
          s += pk.w[c] * pj.w[b] * pi.w[a] *
               coarse[cg.index(pi.idx[a], pj.idx[b], pk.idx[c])];
    fine[idx] += s;
  });
}

void restrict_to_coarse(const TransferPair& tp, std::span<const double> fine,
                        std::span<double> coarse) {
  const LevelGrid& cg = tp.coarse;
  std::fill(coarse.begin(), coarse.end(), 0.0);
  for_each_fine_node(tp, [&](std::int64_t idx, const AxisParents& pi,
                             const AxisParents& pj, const AxisParents& pk) {
    const double v = fine[idx];
    if (v == 0.0) return;
    for (int c = 0; c < pk.count; ++c)
      for (int b = 0; b < pj.count; ++b)
        for (int a = 0; a < pi.count; ++a)
          coarse[cg.index(pi.idx[a], pj.idx[b], pk.idx[c])] +=
              pk.w[c] * pj.w[b] * pi.w[a] * v;
  });
}

void restrict_to_coarse_masked(const TransferPair& tp,
                               std::span<const double> fine,
                               std::span<double> coarse, MaskSpan mask,
                               NodeClass cls) {
  restrict_to_coarse(tp, fine, coarse);
  for (std::size_t i = 0; i < coarse.size(); ++i)
    if (mask[i] != cls) coarse[i] = 0;
}

GridVector assemble_rhs(const MeshHierarchy& mesh, const ScalarField& f,
                        const ScalarField& g) {
  const LevelGrid& grid = mesh.finest_grid();
  const int m = grid.cells;
  const double h = grid.spacing;
  const double h3 = h * h * h;
  GridVector rhs(grid.interior_count());

  std::int64_t idx = 0;
  for (int k = 1; k < m; ++k)
    for (int j = 1; j < m; ++j)
      for (int i = 1; i < m; ++i, ++idx) {
        double v = f(grid.coord(i), grid.coord(j), grid.coord(k)) * h3;
        const bool shell = i == 1 || i == m - 1 || j == 1 || j == m - 1 ||
                           k == 1 || k == m - 1;
        if (shell) {
          // Dirichlet lifting: move stencil columns of eliminated
          // boundary neighbors to the right-hand side.
          for (const Tap& t : kTaps) {
            const int ii = i + t.di, jj = j + t.dj, kk = k + t.dk;
            const bool boundary = ii == 0 || jj == 0 || kk == 0 || ii == m ||
                                  jj == m || kk == m;
            if (!boundary) continue;
            v -= h * t.w * g(grid.coord(ii), grid.coord(jj), grid.coord(kk));
          }
        }
        rhs[idx] = v;
      }
  return rhs;
}

double verify_galerkin(std::span<const LevelSystem> systems, int num_vectors) {
  Rng rng(0x5eedu);
  double worst = 0;
  for (std::size_t ell = 0; ell + 1 < systems.size(); ++ell) {
    const LevelSystem& coarse = systems[ell];
    const LevelSystem& fine = systems[ell + 1];
    const TransferPair tp{coarse.grid, fine.grid};
    GridVector v(coarse.size()), av(coarse.size()), rapv(coarse.size());
    GridVector pv(fine.size()), apv(fine.size());
    for (int trial = 0; trial < num_vectors; ++trial) {
      for (double& x : v) x = rng.symmetric();
      apply_operator(coarse, v, av);
      prolongate(tp, v, pv);
      apply_operator(fine, pv, apv);
      restrict_to_coarse(tp, apv, rapv);
      double num = 0, den = 0;
      for (std::int64_t i = 0; i < coarse.size(); ++i) {
        const double d = av[i] - rapv[i];
        num += d * d;
        den += av[i] * av[i];
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
  }
  return worst;
}

}  // namespace resmg
