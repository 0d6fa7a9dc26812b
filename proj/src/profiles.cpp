#include "hardy_hinf/profiles.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hardy_hinf/errors.hpp"

namespace hardy_hinf {

double RadialProfile::operator()(double r) const {
  switch (kind) {
    case Kind::kZero: return 0.0;
    case Kind::kConstant: return amplitude;
    case Kind::kLinear: return amplitude * r;
    case Kind::kSine: return amplitude * std::sin(std::numbers::pi * r / p1);
    case Kind::kShell: return (r >= p1 && r < p2) ? amplitude : 0.0;
  }
  return 0.0;
}

double RadialProfile::derivative(double r) const {
  switch (kind) {
    case Kind::kLinear: return amplitude;
    case Kind::kSine:
      return amplitude * std::numbers::pi / p1 *
             std::cos(std::numbers::pi * r / p1);
    default: return 0.0;
  }
}

RadialProfile RadialProfile::parse(const std::string& text) {
  std::istringstream in(text);
  std::string name;
  in >> name;
  std::vector<double> args;
  double x;
  while (in >> x) args.push_back(x);
  if (!in.eof()) throw_invalid("cannot parse profile '" + text + "'");
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw_invalid("wrong number of arguments in profile '" + text + "'");
  };
  if (name == "zero" || name == "none") {
    need(0, 0);
    return zero();
  }
  if (name == "constant") {
    need(1, 1);
    return constant(args[0]);
  }
  if (name == "linear") {
    need(1, 1);
    return linear(args[0]);
  }
  if (name == "sine") {
    need(2, 2);
    if (!(args[1] > 0)) throw_invalid("sine profile needs a positive radius");
    return sine(args[0], args[1]);
  }
  if (name == "shell") {
    need(2, 3);
    if (!(args[0] >= 0 && args[0] < args[1]))
      throw_invalid("shell profile needs 0 <= lo < hi");
    return shell(args[0], args[1], args.size() == 3 ? args[2] : 1.0);
  }
  throw_invalid("unknown profile kind '" + name + "'");
}

std::string RadialProfile::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::kZero: out << "zero"; break;
    case Kind::kConstant: out << "constant " << amplitude; break;
    case Kind::kLinear: out << "linear " << amplitude; break;
    case Kind::kSine: out << "sine " << amplitude << ' ' << p1; break;
    case Kind::kShell: out << "shell " << p1 << ' ' << p2 << ' ' << amplitude; break;
  }
  return out.str();
}

double radial_divergence(const RadialProfile& v, int dim, double r) {
  if (v.is_zero()) return 0.0;
  if (v.kind == RadialProfile::Kind::kLinear) return dim * v.amplitude;
  return v.derivative(r) + (dim - 1) * v(r) / r;
}

namespace {

template <typename F>
double sampled_sup(F&& f, double radius) {
  constexpr int kSamples = 20000;
  double best = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double r = (i + 0.5) * radius / kSamples;
    best = std::max(best, std::abs(f(r)));
  }
  return best;
}

}  // namespace

double profile_sup(const RadialProfile& v, double radius) {
  switch (v.kind) {
    case RadialProfile::Kind::kZero: return 0.0;
    case RadialProfile::Kind::kConstant: return std::abs(v.amplitude);
    case RadialProfile::Kind::kLinear: return std::abs(v.amplitude) * radius;
    case RadialProfile::Kind::kShell: return std::abs(v.amplitude);
    case RadialProfile::Kind::kSine:
      return v.p1 <= 2 * radius ? std::abs(v.amplitude)
                                : sampled_sup(v, radius);
  }
  return 0.0;
}

double divergence_sup(const RadialProfile& v, int dim, double radius) {
  switch (v.kind) {
    case RadialProfile::Kind::kZero: return 0.0;
    case RadialProfile::Kind::kLinear: return std::abs(dim * v.amplitude);
    case RadialProfile::Kind::kSine:
      // The supremum is attained in the limit r -> 0.
      return std::max(std::abs(dim * v.amplitude * std::numbers::pi / v.p1),
                      sampled_sup([&](double r) { return radial_divergence(v, dim, r); },
                                  radius));
    default:
      if (v.is_zero()) return 0.0;
      // (N - 1) c / r is unbounded near the origin.
      return std::numeric_limits<double>::infinity();
  }
}

}  // namespace hardy_hinf
