#include "resmg/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "resmg/rng.hpp"

namespace resmg {

double discrete_norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

double discrete_norm_class(std::span<const double> v, MaskSpan labels,
                           NodeClass cls, std::int64_t count) {
  if (count == 0) return 0;
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (labels[i] == cls) s += v[i] * v[i];
  return std::sqrt(s / static_cast<double>(count));
}

std::vector<double> rank_squared_sums(std::span<const double> v,
                                      const Partition& part,
                                      const LevelGrid& grid) {
  std::vector<double> sums(part.ranks(), 0.0);
  const int m = grid.cells;
  const int ell = grid.level;
  std::int64_t idx = 0;
  for (int k = 1; k < m; ++k) {
    const int bk = part.axis_owner(ell, k);
    for (int j = 1; j < m; ++j) {
      const int base = part.p_axis * (part.axis_owner(ell, j) + part.p_axis * bk);
      for (int i = 1; i < m; ++i, ++idx)
        sums[part.axis_owner(ell, i) + base] += v[idx] * v[idx];
    }
  }
  return sums;
}

HwReport hw_estimate(std::span<const LevelSystem> systems,
                     std::span<const double> r_fine, const Partition& part,
                     MultigridWorkspace& ws, const CycleConfig& cfg,
                     bool keep_field) {
  const int top = static_cast<int>(systems.size()) - 1;

  // Successive restriction of the finest residual; the finest slot
  // aliases the caller's vector.
  for (int level = top; level >= 1; --level) {
    const TransferPair tp{systems[level - 1].grid, systems[level].grid};
    std::span<const double> rl = level == top ? r_fine : std::span<const double>(ws.f[level]);
    restrict_to_coarse(tp, rl, ws.f[level - 1]);
  }

  // Upward accumulation sum_l P (...) + D_l^{-1} r_l, starting from the
  // full coarse inverse.
  pcg_coarse(systems[0], ws.f[0], ws.sum[0], cfg.coarse_iters, Mask::full());
  for (int level = 1; level <= top; ++level) {
    const LevelSystem& sys = systems[level];
    std::span<const double> rl = level == top ? r_fine : std::span<const double>(ws.f[level]);
    const double inv_diag = 1.0 / sys.diagonal();
    GridVector& sl = ws.sum[level];
    for (std::int64_t i = 0; i < sys.size(); ++i) sl[i] = inv_diag * rl[i];
    const TransferPair tp{systems[level - 1].grid, sys.grid};
    prolongate_add(tp, ws.sum[level - 1], sl);
  }

  const GridVector& s = ws.sum[top];
  HwReport report;
  report.eta = discrete_norm(s);
  report.rank_nodes = part.owned[top];
  std::vector<double> sums = rank_squared_sums(s, part, systems[top].grid);
  report.rank_eta.resize(sums.size());
  for (std::size_t p = 0; p < sums.size(); ++p)
    report.rank_eta[p] =
        std::sqrt(sums[p] / static_cast<double>(report.rank_nodes[p]));
  if (keep_field) report.field = s;
  return report;
}

double hw_estimate_faulty(std::span<const LevelSystem> systems,
                          const GridVector& u, std::span<const double> f,
                          const SubdomainSets& sets, MultigridWorkspace& ws,
                          const CycleConfig& cfg) {
  const int top = static_cast<int>(systems.size()) - 1;
  const NodeClass cls = NodeClass::faulty_interior;
  const Mask mask = Mask::domain(sets, cls);

  residual_masked(systems[top], u, f, ws.r[top], sets.level(top), cls);
  for (int level = top; level >= 1; --level) {
    const TransferPair tp{systems[level - 1].grid, systems[level].grid};
    std::span<const double> rl = level == top ? std::span<const double>(ws.r[top])
                                              : std::span<const double>(ws.f[level]);
    restrict_to_coarse_masked(tp, rl, ws.f[level - 1], sets.level(level - 1), cls);
  }

  pcg_coarse(systems[0], ws.f[0], ws.sum[0], cfg.coarse_iters, mask);
  for (int level = 1; level <= top; ++level) {
    const LevelSystem& sys = systems[level];
    std::span<const double> rl = level == top ? std::span<const double>(ws.r[top])
                                              : std::span<const double>(ws.f[level]);
    const double inv_diag = 1.0 / sys.diagonal();
    MaskSpan lab = sets.level(level);
    GridVector& sl = ws.sum[level];
    for (std::int64_t i = 0; i < sys.size(); ++i)
      sl[i] = lab[i] == cls ? inv_diag * rl[i] : 0.0;
    const TransferPair tp{systems[level - 1].grid, sys.grid};
    prolongate_add_masked(tp, ws.sum[level - 1], sl, lab, cls);
  }

  // n_F-weighted subdomain norm == plain Euclidean norm over I_F.
  double s = 0;
  MaskSpan lab = sets.level(top);
  const GridVector& field = ws.sum[top];
  for (std::size_t i = 0; i < field.size(); ++i)
    if (lab[i] == cls) s += field[i] * field[i];
  return std::sqrt(s);
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void fill_random(GridVector& v, Rng& rng) {
  for (double& x : v) x = rng.symmetric();
}

}  // namespace

EigBounds estimate_eigs(std::span<const LevelSystem> systems,
                        const CycleConfig& cfg, int max_iters,
                        std::uint64_t seed) {
  const LevelSystem& sys = systems.back();
  const std::int64_t n = sys.size();
  EigBounds out;
  Rng rng(seed);

  // Rayleigh quotients stagnate well below the flagging threshold long
  // before the cap; the early exit keeps the run cheap and deterministic.
  constexpr double rel_exit = 1e-12;
  constexpr double rel_flag = 1e-2;

  {
    GridVector v(n), w(n);
    fill_random(v, rng);
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    double prev = 0, cur = 0;
    for (int it = 0; it < max_iters; ++it) {
      apply_operator(sys, v, w);
      prev = cur;
      cur = 0;
      for (std::int64_t i = 0; i < n; ++i) cur += v[i] * w[i];
      const double nw = norm2(w);
      for (std::int64_t i = 0; i < n; ++i) v[i] = w[i] / nw;
      if (it > 0 && std::abs(cur - prev) <= rel_exit * std::abs(cur)) break;
    }
    out.lambda_max = cur;
    out.max_converged = std::abs(cur - prev) <= rel_flag * std::abs(cur);
  }

  {
    MultigridWorkspace ws(systems);
    GridVector v(n), w(n), r(n);
    fill_random(v, rng);
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    nv = 1.0;
    double prev = 0, cur = 0;
    for (int it = 0; it < max_iters; ++it) {
      // Inner solve A w = v, heavily converged so the quotient
      // w.v / w.w is a trustworthy Rayleigh quotient of A at w.
      w.assign(n, 0.0);
      for (int cycle = 0; cycle < 100; ++cycle) {
        v_cycle(systems, ws, w, v, cfg, Mask::full());
        residual(sys, w, v, r);
        if (norm2(r) <= 1e-13 * nv) break;
      }
      double wv = 0, ww = 0;
      for (std::int64_t i = 0; i < n; ++i) {
        wv += w[i] * v[i];
        ww += w[i] * w[i];
      }
      prev = cur;
      cur = wv / ww;
      nv = std::sqrt(ww);
      for (std::int64_t i = 0; i < n; ++i) v[i] = w[i] / nv;
      nv = 1.0;
      if (it > 0 && std::abs(cur - prev) <= rel_exit * std::abs(cur)) break;
    }
    out.lambda_min = cur;
    out.min_converged = std::abs(cur - prev) <= rel_flag * std::abs(cur);
  }
  return out;
}

}  // namespace resmg
