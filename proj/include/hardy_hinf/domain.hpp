#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hardy_hinf {

/// Cell-centered radial mesh of the ball B_R(0) in R^N. Node i sits at
/// r_i = (i + 1/2) h with h = R / n, so no node is placed at the origin.
/// Weights are |S^{N-1}| r_i^{N-1} h (midpoint rule for the volume integral).
struct RadialGrid {
  int dim = 3;
  double radius = 1.0;
  int n = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  /// Radii of the n cell faces (i + 1) h; the last one is r = R.
  Eigen::VectorXd faces;
  /// |S^{N-1}| r_f^{N-1} on each face.
  Eigen::VectorXd face_areas;
  double sphere_area = 0.0;

  double volume() const { return weights.sum(); }
};

/// Radial shell [r_lo, r_hi). Encodes the subdomains as annuli.
struct Annulus {
  double r_lo = 0.0;
  double r_hi = 0.0;

  bool contains(double r) const { return r >= r_lo && r < r_hi; }
  /// True when this shell is compactly contained in `outer`, with `outer`
  /// treated as an open set in the ball (an inner radius of 0 is interior).
  bool compactly_inside(const Annulus& outer) const;
};

struct Mask {
  Eigen::VectorXd values;
  /// Set when no grid node falls inside the shell.
  bool degenerate = false;
};

/// ((N - 2) / 2)^2, the optimal constant in the Hardy inequality.
double hardy_constant(int dim);

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int dim);

RadialGrid build_radial_grid(int dim, double radius, int n);

Mask indicator(const RadialGrid& grid, const Annulus& shell);

/// Exact volume of the shell {r_lo <= |x| < r_hi} in R^N.
double shell_volume(int dim, const Annulus& shell);

}  // namespace hardy_hinf
