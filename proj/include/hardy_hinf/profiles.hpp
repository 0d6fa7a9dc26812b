#pragma once

#include <string>

namespace hardy_hinf {

/// Radial scalar profiles used for the actuator b(r) and the radial
/// convection component v_r(r). The vector field is v(x) = v_r(|x|) x / |x|.
struct RadialProfile {
  enum class Kind { kZero, kConstant, kLinear, kSine, kShell };

  Kind kind = Kind::kZero;
  double amplitude = 0.0;
  /// kSine: period parameter (the radius R); kShell: [lo, hi).
  double p1 = 0.0;
  double p2 = 0.0;

  static RadialProfile zero() { return {}; }
  static RadialProfile constant(double c) { return {Kind::kConstant, c, 0, 0}; }
  static RadialProfile linear(double c) { return {Kind::kLinear, c, 0, 0}; }
  /// c sin(pi r / R); vanishes at both ends of [0, R].
  static RadialProfile sine(double c, double radius) {
    return {Kind::kSine, c, radius, 0};
  }
  static RadialProfile shell(double lo, double hi, double amplitude = 1.0) {
    return {Kind::kShell, amplitude, lo, hi};
  }

  double operator()(double r) const;
  /// d/dr; zero for the piecewise-constant kinds.
  double derivative(double r) const;
  bool is_zero() const { return kind == Kind::kZero || amplitude == 0.0; }

  /// Parses "zero", "constant c", "linear c", "sine c R", "shell lo hi [amp]".
  static RadialProfile parse(const std::string& text);
  std::string to_string() const;
};

/// Divergence of v(x) = v_r(|x|) x/|x| in R^N: v_r' + (N - 1) v_r / r.
double radial_divergence(const RadialProfile& v, int dim, double r);

/// sup_{0 < r < R} |v_r(r)| and sup |div v|, by dense sampling plus the
/// closed forms where available.
double profile_sup(const RadialProfile& v, double radius);
double divergence_sup(const RadialProfile& v, int dim, double radius);

}  // namespace hardy_hinf
