#pragma once

#include <variant>
#include <vector>

#include "emenc/vec3.hpp"

namespace emenc {

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

/// Axis-aligned ellipsoid.
struct Ellipsoid {
  Vec3 center;
  Vec3 semi_axes;
};

/// Axis-aligned box [lo, hi].
struct Box {
  Vec3 lo;
  Vec3 hi;
};

struct Aabb {
  Vec3 lo;
  Vec3 hi;
  double diagonal() const { return norm(hi - lo); }
  bool contains(const Vec3& x) const {
    return x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y && x.z >= lo.z && x.z <= hi.z;
  }
};

class Shape;

struct ShapeUnion {
  std::vector<Shape> parts;
};

/// Bounded open set D. Immutable value type.
class Shape {
 public:
  using Variant = std::variant<Sphere, Ellipsoid, Box, ShapeUnion>;

  Shape(Sphere s);
  Shape(Ellipsoid e);
  Shape(Box b);
  Shape(ShapeUnion u);

  const Variant& variant() const { return v_; }

  /// Open interior membership.
  bool contains(const Vec3& x) const;
  /// Positive outside, negative inside; Lipschitz-1. Exact outside for all variants.
  double signed_distance(const Vec3& x) const;
  /// Nearest point of the boundary to an exterior point.
  Vec3 nearest_boundary_point(const Vec3& x) const;
  Aabb bounds() const;
  double diameter() const { return bounds().diagonal(); }
  bool is_smooth() const;

 private:
  Variant v_;
};

/// Exact closest point on an axis-aligned ellipsoid surface (robust bisection root of the
/// stationarity condition). Returns the point in world coordinates.
Vec3 ellipsoid_closest_point(const Ellipsoid& e, const Vec3& x);

/// Value, gradient and Hessian of the implicit function F with F < 0 inside, F = 0 on the
/// surface, for smooth primitives (sphere, ellipsoid).
struct ImplicitJet {
  double value = 0.0;
  Vec3 grad;
  double hess[3][3] = {};
};
ImplicitJet implicit_jet(const Sphere& s, const Vec3& x);
ImplicitJet implicit_jet(const Ellipsoid& e, const Vec3& x);

/// Low-discrepancy point in [0,1)^3 (Halton, bases 2/3/5).
Vec3 halton3(unsigned index);

}  // namespace emenc
