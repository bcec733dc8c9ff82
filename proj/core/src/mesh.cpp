#include "resmg/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace resmg {

MeshHierarchy build_hierarchy(int coarse_cells, int finest) {
  if (coarse_cells < 2)
    throw std::invalid_argument("hierarchy: need at least 2 cells per axis on level 0");
  if (finest < 1)
    throw std::invalid_argument("hierarchy: need at least one refined level");

  MeshHierarchy mesh;
  mesh.coarse_cells = coarse_cells;
  mesh.finest = finest;
  mesh.levels.resize(finest + 1);
  for (int ell = 0; ell <= finest; ++ell) {
    LevelGrid& g = mesh.levels[ell];
    g.level = ell;
    g.cells = coarse_cells << ell;
    g.spacing = 1.0 / g.cells;
  }
  return mesh;
}

Partition build_partition(const MeshHierarchy& mesh, int p_axis) {
  if (p_axis < 1 || mesh.coarse_cells % p_axis != 0)
    throw std::invalid_argument("partition: p_axis must divide the level-0 cell count, got " +
                                std::to_string(p_axis));

  Partition part;
  part.p_axis = p_axis;
  part.box_cells.resize(mesh.levels.size());
  part.owned.resize(mesh.levels.size());
  for (const LevelGrid& g : mesh.levels) {
    part.box_cells[g.level] = g.cells / p_axis;
    std::vector<std::int64_t> counts(part.ranks(), 0);
    // Ownership factorizes over axes: count nodes per box slab once.
    std::vector<std::int64_t> axis_counts(p_axis, 0);
    for (int i = 1; i < g.cells; ++i) ++axis_counts[part.axis_owner(g.level, i)];
    for (int bz = 0; bz < p_axis; ++bz)
      for (int by = 0; by < p_axis; ++by)
        for (int bx = 0; bx < p_axis; ++bx)
          counts[bx + p_axis * (by + p_axis * bz)] =
              axis_counts[bx] * axis_counts[by] * axis_counts[bz];
    part.owned[g.level] = std::move(counts);
  }
  return part;
}

SubdomainSets classify_subdomains(const MeshHierarchy& mesh,
                                  const Partition& part,
                                  std::span<const int> faulty_ranks) {
  if (faulty_ranks.empty())
    throw std::invalid_argument("subdomains: faulty rank set is empty");
  std::vector<int> sorted(faulty_ranks.begin(), faulty_ranks.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("subdomains: duplicate faulty rank");
  if (sorted.front() < 0 || sorted.back() >= part.ranks())
    throw std::invalid_argument("subdomains: faulty rank out of range");
  if (static_cast<int>(sorted.size()) == part.ranks())
    throw std::invalid_argument("subdomains: all ranks faulty, nothing to recover from");

  std::vector<char> faulty(part.ranks(), 0);
  for (int r : sorted) faulty[r] = 1;

  SubdomainSets sets;
  sets.faulty_ranks = std::move(sorted);
  const int nlev = static_cast<int>(mesh.levels.size());
  sets.labels.resize(nlev);
  sets.faulty_count.assign(nlev, 0);
  sets.interface_count.assign(nlev, 0);
  sets.healthy_count.assign(nlev, 0);

  for (const LevelGrid& g : mesh.levels) {
    const int ell = g.level;
    const int m = g.cells;
    std::vector<NodeClass>& lab = sets.labels[ell];
    lab.assign(g.interior_count(), NodeClass::healthy_interior);

    // Classify along each axis once: a cell column index c in [0, m-1]
    // maps to box c/w.  A node i touches cells i-1 and i.
    std::int64_t idx = 0;
    for (int k = 1; k < m; ++k)
      for (int j = 1; j < m; ++j)
        for (int i = 1; i < m; ++i, ++idx) {
          int faulty_cells = 0;
          for (int dk = -1; dk <= 0; ++dk)
            for (int dj = -1; dj <= 0; ++dj)
              for (int di = -1; di <= 0; ++di)
                faulty_cells +=
                    faulty[part.cell_owner(ell, i + di, j + dj, k + dk)];
          if (faulty_cells == 8) {
            lab[idx] = NodeClass::faulty_interior;
            ++sets.faulty_count[ell];
          } else if (faulty_cells > 0) {
            lab[idx] = NodeClass::interface;
            ++sets.interface_count[ell];
          } else {
            ++sets.healthy_count[ell];
          }
        }
  }
  return sets;
}

}  // namespace resmg
