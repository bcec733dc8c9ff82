#pragma once

#include <cstdint>
#include <string>

#include "resmg/operators.hpp"

namespace resmg {

// Built-in problem setups on the unit cube with Dirichlet data.
//
//   cube-sin        smooth oblique wave u = sin((x + sqrt(2) y) pi) *
//                   sin(sqrt(3) z pi), source 6 pi^2 u, boundary trace u;
//                   has a known continuum solution.
//   cube-random-rhs seeded random nodal load, homogeneous boundary; for
//                   purely algebraic studies.
//   custom          unit load, homogeneous boundary; hook for manual
//                   experiments.
struct ProblemSetup {
  std::string id;
  ScalarField source;    // null for cube-random-rhs
  ScalarField boundary;  // g on the cube surface
  ScalarField exact;     // null when no continuum solution is known
};

// Throws std::invalid_argument for unknown ids.
ProblemSetup make_problem(const std::string& id);

// Finest-level load vector; the seed only matters for cube-random-rhs.
GridVector make_problem_rhs(const ProblemSetup& problem,
                            const MeshHierarchy& mesh, std::uint64_t seed);

// Nodal samples of a scalar field on one level, interior ordering.
GridVector sample_nodal(const ScalarField& field, const LevelGrid& grid);

}  // namespace resmg
