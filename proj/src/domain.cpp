#include "hardy_hinf/domain.hpp"

#include <cmath>
#include <numbers>

#include "hardy_hinf/errors.hpp"

namespace hardy_hinf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kGammaInfeasible: return "GammaInfeasible";
    case ErrorKind::kSubspaceDegenerate: return "SubspaceDegenerate";
    case ErrorKind::kNewtonDiverged: return "NewtonDiverged";
    case ErrorKind::kNoFeasibleGamma: return "NoFeasibleGamma";
    case ErrorKind::kClosedLoopUnstable: return "ClosedLoopUnstable";
    case ErrorKind::kUnstable: return "Unstable";
    case ErrorKind::kDetectabilityViolated: return "DetectabilityViolated";
    case ErrorKind::kSolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

bool Annulus::compactly_inside(const Annulus& outer) const {
  const bool lower_ok = (outer.r_lo == 0.0) ? r_lo >= 0.0 : r_lo > outer.r_lo;
  return lower_ok && r_hi < outer.r_hi && r_lo < r_hi;
}

double hardy_constant(int dim) {
  if (dim < 3) throw_invalid("Hardy constant requires N >= 3");
  const double half = (dim - 2) / 2.0;
  return half * half;
}

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

RadialGrid build_radial_grid(int dim, double radius, int n) {
  if (dim < 3) throw_invalid("grid dimension must be >= 3");
  if (!(radius > 0.0)) throw_invalid("grid radius must be positive");
  // Assembly needs n >= 8; the grid itself is well defined from 4 cells.
  if (n < 4) throw_invalid("grid needs at least 4 cells");

  RadialGrid g;
  g.dim = dim;
  g.radius = radius;
  g.n = n;
  g.h = radius / n;
  g.sphere_area = unit_sphere_area(dim);
  g.nodes.resize(n);
  g.weights.resize(n);
  g.faces.resize(n);
  g.face_areas.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * g.h;
    const double rf = (i + 1) * g.h;
    g.nodes[i] = r;
    g.weights[i] = g.sphere_area * std::pow(r, dim - 1) * g.h;
    g.faces[i] = rf;
    g.face_areas[i] = g.sphere_area * std::pow(rf, dim - 1);
  }
  // Keep the outermost face exactly at R.
  g.faces[n - 1] = radius;
  g.face_areas[n - 1] = g.sphere_area * std::pow(radius, dim - 1);
  return g;
}

Mask indicator(const RadialGrid& grid, const Annulus& shell) {
  if (shell.r_lo < 0.0 || shell.r_hi > grid.radius || shell.r_lo >= shell.r_hi)
    throw_invalid("annulus must satisfy 0 <= r_lo < r_hi <= R");
  Mask m;
  m.values = Eigen::VectorXd::Zero(grid.n);
  for (int i = 0; i < grid.n; ++i)
    if (shell.contains(grid.nodes[i])) m.values[i] = 1.0;
  m.degenerate = m.values.sum() == 0.0;
  return m;
}

double shell_volume(int dim, const Annulus& shell) {
  return unit_sphere_area(dim) / dim *
         (std::pow(shell.r_hi, dim) - std::pow(shell.r_lo, dim));
}

}  // namespace hardy_hinf
