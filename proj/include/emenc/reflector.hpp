#pragma once

#include <array>
#include <vector>

#include "emenc/shape.hpp"

namespace emenc {

/// 2x2 shape operator in an orthonormal tangent basis. Convention: S = -d(nu) for the outward
/// unit normal nu, so a sphere of radius R has S = -(1/R) I, H = -1/R, K = 1/R^2. With this
/// convention S_q(S(p,dD)) = lambda I and S_q(S(p,dD)) - S_q(dD) is positive semidefinite at a
/// first-reflector point.
struct ShapeOperator {
  Vec3 normal;
  std::array<Vec3, 2> tangent;
  double m[2][2] = {};

  double gauss() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  double mean() const { return 0.5 * (m[0][0] + m[1][1]); }
  /// det(lambda I - S).
  double relative_det(double lambda) const {
    return (lambda - m[0][0]) * (lambda - m[1][1]) - m[0][1] * m[1][0];
  }
};

ShapeOperator shape_operator(const ImplicitJet& jet);

struct ReflectorPoint {
  Vec3 q;
  Vec3 nu;
  double gauss = 0.0;      ///< K, closed form
  double mean = 0.0;       ///< H, closed form
  double det_diff = 0.0;   ///< det(S_q(S(p,dD)) - S_q(dD)) from the shape-operator matrix
};

struct ReflectorFlags {
  bool b1 = false;  ///< K > 0 at every reflector point
  bool b2 = false;  ///< det_diff > 0 at every reflector point
  bool b3 = false;  ///< some point with |a x nu| > normal_tol
};

struct ReflectorReport {
  std::vector<ReflectorPoint> points;
  double lambda = 0.0;
  double dist_pD = 0.0;
  ReflectorFlags flags;
};

struct ReflectorOptions {
  int seeds = 1000;
  /// Clustering tolerance as a fraction of the shape diameter.
  double cluster_rel_tol = 1e-6;
  double normal_tol = 1e-8;
};

/// All global minimizers q of |q - p| over dD, with curvature data and (B.I)-(B.III) flags.
/// Throws geometry if p is not exterior, unsupported_geometry for boxes.
ReflectorReport first_reflector(const Shape& shape, const Vec3& p, const Vec3& a,
                                const ReflectorOptions& opts = {});

}  // namespace emenc
