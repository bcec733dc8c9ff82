#include "resmg/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "resmg/rng.hpp"

namespace resmg {

ProblemSetup make_problem(const std::string& id) {
  using std::numbers::pi;
  ProblemSetup p;
  p.id = id;
  if (id == "cube-sin") {
    const double s2 = std::sqrt(2.0);
    const double s3 = std::sqrt(3.0);
    p.exact = [=](double x, double y, double z) {
      return std::sin((x + s2 * y) * pi) * std::sin(s3 * z * pi);
    };
    p.source = [exact = p.exact, pi2 = pi * pi](double x, double y, double z) {
      return 6.0 * pi2 * exact(x, y, z);
    };
    p.boundary = p.exact;
  } else if (id == "cube-random-rhs") {
    p.boundary = [](double, double, double) { return 0.0; };
  } else if (id == "custom") {
    p.source = [](double, double, double) { return 1.0; };
    p.boundary = [](double, double, double) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown problem id: " + id);
  }
  return p;
}

GridVector make_problem_rhs(const ProblemSetup& problem,
                            const MeshHierarchy& mesh, std::uint64_t seed) {
  if (problem.source) return assemble_rhs(mesh, problem.source, problem.boundary);

  // Random nodal load with the usual volume weight, in node order so the
  // result depends only on the seed.
  const LevelGrid& grid = mesh.finest_grid();
  const double h3 = grid.spacing * grid.spacing * grid.spacing;
  GridVector rhs(grid.interior_count());
  Rng rng(seed);
  for (double& x : rhs) x = rng.symmetric() * h3;
  return rhs;
}

GridVector sample_nodal(const ScalarField& field, const LevelGrid& grid) {
  GridVector out(grid.interior_count());
  std::int64_t idx = 0;
  for (int k = 1; k < grid.cells; ++k)
    for (int j = 1; j < grid.cells; ++j)
      for (int i = 1; i < grid.cells; ++i, ++idx)
        out[idx] = field(grid.coord(i), grid.coord(j), grid.coord(k));
  return out;
}

}  // namespace resmg
