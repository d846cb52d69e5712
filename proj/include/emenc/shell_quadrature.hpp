#pragma once

#include <functional>
#include <vector>

#include "emenc/shape.hpp"
#include "emenc/vec3.hpp"

namespace emenc {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

/// Parameter intervals [r0, r1], r >= 0, where p + r w lies in D (merged, ascending).
std::vector<std::pair<double, double>> ray_intervals(const Shape& shape, const Vec3& p, const Vec3& w);

struct ShellQuadOptions {
  int n_theta = 96;
  int n_phi = 96;
  int n_radial = 16;  ///< per radial chunk
  /// Relative agreement required between the rule and a 1.5x refined rule; <= 0 skips the check.
  double rel_tol = 1e-6;
};

struct ShellIntegral {
  double value = 0.0;       ///< integral = value * e^{log_offset}
  double log_offset = 0.0;  ///< -rate * dist(p, D)
  double refined_rel_diff = 0.0;
};

/// Integral over D of e^{-rate |x - p|} g(r, n), r = |x - p|, n = (x - p) / r, in spherical
/// shells about an exterior point p. The angular rule covers the cone subtended by D's
/// bounding sphere; the radial rule is composite Gauss-Legendre on chunks of length 4 / rate
/// from each entry point, cut at 40 / rate. Throws accuracy if the refined rule disagrees.
ShellIntegral shell_integral(const Shape& shape, const Vec3& p, double rate,
                             const std::function<double(double r, const Vec3& n)>& g,
                             const ShellQuadOptions& opt = {});

}  // namespace emenc
