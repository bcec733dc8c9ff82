#pragma once

#include <functional>
#include <span>
#include <vector>

#include "resmg/mesh.hpp"

namespace resmg {

// Matrix-free stiffness operator of the trilinear finite element
// discretization of -Laplace(u) on one level.  The assembled interior
// stencil is translation invariant,
//
//   h * ( 8/3 center, 0 face, -1/6 edge, -1/12 corner ),
//
// and the diagonal is constant because every interior node touches all
// eight adjacent elements.  Eliminated boundary values are zero.
struct LevelSystem {
  LevelGrid grid;

  static constexpr double center_weight = 8.0 / 3.0;
  static constexpr double edge_weight = -1.0 / 6.0;
  static constexpr double corner_weight = -1.0 / 12.0;

  double diagonal() const { return center_weight * grid.spacing; }
  std::int64_t size() const { return grid.interior_count(); }
};

std::vector<LevelSystem> build_level_systems(const MeshHierarchy& mesh);

using GridVector = std::vector<double>;
using MaskSpan = std::span<const NodeClass>;

// out = A v.  With a mask, rows outside the selected class are set to 0;
// columns are never masked, so frozen neighbor values enter the product.
void apply_operator(const LevelSystem& sys, std::span<const double> v,
                    std::span<double> out);
void apply_operator_masked(const LevelSystem& sys, std::span<const double> v,
                           std::span<double> out, MaskSpan mask,
                           NodeClass cls);

// out = f - A u, with the same row-masking convention.
void residual(const LevelSystem& sys, std::span<const double> u,
              std::span<const double> f, std::span<double> out);
void residual_masked(const LevelSystem& sys, std::span<const double> u,
                     std::span<const double> f, std::span<double> out,
                     MaskSpan mask, NodeClass cls);

// Trilinear interpolation between two consecutive levels and its
// transpose.  Both are matrix-free; the weights are 1, 1/2, 1/4, 1/8 by
// coordinate parity.  Restriction is the exact transpose, so the
// variational coarse operator equals the directly assembled one.
struct TransferPair {
  LevelGrid coarse;
  LevelGrid fine;
};

// fine = P coarse (overwrite); masked variant adds into fine nodes of the
// selected class only ("prolongate and correct").
void prolongate(const TransferPair& tp, std::span<const double> coarse,
                std::span<double> fine);
void prolongate_add(const TransferPair& tp, std::span<const double> coarse,
                    std::span<double> fine);
void prolongate_add_masked(const TransferPair& tp,
                           std::span<const double> coarse,
                           std::span<double> fine, MaskSpan mask,
                           NodeClass cls);

// coarse = P^T fine (overwrite); masked variant keeps only coarse rows of
// the selected class.
void restrict_to_coarse(const TransferPair& tp, std::span<const double> fine,
                        std::span<double> coarse);
void restrict_to_coarse_masked(const TransferPair& tp,
                               std::span<const double> fine,
                               std::span<double> coarse, MaskSpan mask,
                               NodeClass cls);

using ScalarField = std::function<double(double, double, double)>;

// Finest-level load vector: mass-lumped source term f(x_i) h^3 plus the
// Dirichlet lifting of boundary data g (stencil columns of eliminated
// boundary neighbors move to the right-hand side).
GridVector assemble_rhs(const MeshHierarchy& mesh, const ScalarField& f,
                        const ScalarField& g);

// Max relative deviation || A_c v - P^T A_f P v || / || A_c v || over all
// consecutive level pairs and a fixed set of seeded random vectors.
// Nested spaces make this a round-off level identity.
double verify_galerkin(std::span<const LevelSystem> systems,
                       int num_vectors = 10);

}  // namespace resmg
