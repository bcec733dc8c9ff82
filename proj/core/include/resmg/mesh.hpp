#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace resmg {

// One refinement level of the unit cube discretized by a structured
// hexahedral grid: m cells per axis, spacing h = 1/m, (m-1)^3 interior
// nodes.  Boundary nodes are eliminated; grid vectors store interior
// values only, x fastest.
struct LevelGrid {
  int level = 0;
  int cells = 0;       // m
  double spacing = 0;  // h = 1/m

  int interior_per_axis() const { return cells - 1; }

  std::int64_t interior_count() const {
    const std::int64_t n = interior_per_axis();
    return n * n * n;
  }

  // Linear index of interior node (i,j,k), i,j,k in [1, cells-1].
  std::int64_t index(int i, int j, int k) const {
    const std::int64_t n = interior_per_axis();
    return (static_cast<std::int64_t>(k - 1) * n + (j - 1)) * n + (i - 1);
  }

  double coord(int i) const { return i * spacing; }
};

// Nested hierarchy levels 0..finest, level ell has coarse_cells * 2^ell
// cells per axis.  Level-(ell+1) nodes with even coordinates coincide
// with level-ell nodes.
struct MeshHierarchy {
  int coarse_cells = 0;  // cells per axis on level 0
  int finest = 0;
  std::vector<LevelGrid> levels;

  const LevelGrid& grid(int ell) const { return levels[ell]; }
  const LevelGrid& finest_grid() const { return levels.back(); }
};

// Throws std::invalid_argument unless coarse_cells >= 2 and finest >= 1.
MeshHierarchy build_hierarchy(int coarse_cells, int finest);

// Decomposition of the cell grid into p_axis^3 congruent boxes, one per
// rank.  Rank boxes are aligned to level-0 cells, so ownership is purely
// geometric and consistent across levels.  Nodes on shared box faces
// belong to the lower-indexed box.
struct Partition {
  int p_axis = 0;
  std::vector<int> box_cells;  // per level: cells per box per axis
  // owned interior-node counts, [level][rank]
  std::vector<std::vector<std::int64_t>> owned;

  int ranks() const { return p_axis * p_axis * p_axis; }

  // Box index along one axis for interior node index i >= 1.
  int axis_owner(int ell, int i) const { return (i - 1) / box_cells[ell]; }

  int owner(int ell, int i, int j, int k) const {
    return axis_owner(ell, i) +
           p_axis * (axis_owner(ell, j) + p_axis * axis_owner(ell, k));
  }

  // Rank of the (closed) cell c in [0, m-1] along each axis.
  int cell_owner(int ell, int ci, int cj, int ck) const {
    const int w = box_cells[ell];
    return ci / w + p_axis * (cj / w + p_axis * (ck / w));
  }
};

// Throws std::invalid_argument unless p_axis >= 1 divides coarse_cells.
Partition build_partition(const MeshHierarchy& mesh, int p_axis);

enum class NodeClass : std::uint8_t {
  healthy_interior = 0,  // I_I
  interface = 1,         // I_Gamma
  faulty_interior = 2,   // I_F
};

// Per-level split of the interior nodes induced by a set of faulty ranks.
// A node is faulty-interior iff it lies strictly inside the union of the
// faulty rank boxes (equivalently: all adjacent cells are faulty-owned),
// interface iff it lies on the boundary of that union.
struct SubdomainSets {
  std::vector<int> faulty_ranks;  // sorted, nonempty proper subset
  std::vector<std::vector<NodeClass>> labels;  // [level][node]
  std::vector<std::int64_t> faulty_count;      // |I_F| per level
  std::vector<std::int64_t> interface_count;   // |I_Gamma| per level
  std::vector<std::int64_t> healthy_count;     // |I_I| per level

  std::span<const NodeClass> level(int ell) const { return labels[ell]; }
};

// Throws std::invalid_argument if faulty_ranks is empty, out of range,
// contains duplicates, or covers all ranks.
SubdomainSets classify_subdomains(const MeshHierarchy& mesh,
                                  const Partition& part,
                                  std::span<const int> faulty_ranks);

}  // namespace resmg
