#include "emenc/shape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace emenc {

namespace {

double robust_length(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  if (m == 0.0) return 0.0;
  return m * std::hypot(a / m, b / m);
}

double robust_length(double a, double b, double c) {
  const double m = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (m == 0.0) return 0.0;
  const double x = a / m, y = b / m, z = c / m;
  return m * std::sqrt(x * x + y * y + z * z);
}

// Root of sum_i (r_i z_i / (s + r_i))^2 - 1 by bisection (Eberly).
double root2(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0.0 ? 0.0 : robust_length(n0, z1) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double q0 = n0 / (s + r0);
    const double q1 = z1 / (s + 1.0);
    const double gg = q0 * q0 + q1 * q1 - 1.0;
    if (gg > 0.0) {
      s0 = s;
    } else if (gg < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

double root3(double r0, double r1, double z0, double z1, double z2, double g) {
  const double n0 = r0 * z0;
  const double n1 = r1 * z1;
  double s0 = z2 - 1.0;
  double s1 = g < 0.0 ? 0.0 : robust_length(n0, n1, z2) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double q0 = n0 / (s + r0);
    const double q1 = n1 / (s + r1);
    const double q2 = z2 / (s + 1.0);
    const double gg = q0 * q0 + q1 * q1 + q2 * q2 - 1.0;
    if (gg > 0.0) {
      s0 = s;
    } else if (gg < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

// First-quadrant closest point on ellipse with e0 >= e1 > 0, y0, y1 >= 0.
std::array<double, 2> closest_ellipse(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0, z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g != 0.0) {
        const double r0 = (e0 / e1) * (e0 / e1);
        const double s = root2(r0, z0, z1, g);
        return {r0 * y0 / (s + r0), y1 / (s + 1.0)};
      }
      return {y0, y1};
    }
    return {0.0, e1};
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    return {e0 * xde0, e1 * std::sqrt(1.0 - xde0 * xde0)};
  }
  return {e0, 0.0};
}

// First-octant closest point on ellipsoid with e0 >= e1 >= e2 > 0, y_i >= 0.
std::array<double, 3> closest_ellipsoid_sorted(const std::array<double, 3>& e,
                                               const std::array<double, 3>& y) {
  if (y[2] > 0.0) {
    if (y[1] > 0.0) {
      if (y[0] > 0.0) {
        const double z0 = y[0] / e[0], z1 = y[1] / e[1], z2 = y[2] / e[2];
        const double g = z0 * z0 + z1 * z1 + z2 * z2 - 1.0;
        if (g != 0.0) {
          const double r0 = (e[0] / e[2]) * (e[0] / e[2]);
          const double r1 = (e[1] / e[2]) * (e[1] / e[2]);
          const double s = root3(r0, r1, z0, z1, z2, g);
          return {r0 * y[0] / (s + r0), r1 * y[1] / (s + r1), y[2] / (s + 1.0)};
        }
        return y;
      }
      const auto x = closest_ellipse(e[1], e[2], y[1], y[2]);
      return {0.0, x[0], x[1]};
    }
    if (y[0] > 0.0) {
      const auto x = closest_ellipse(e[0], e[2], y[0], y[2]);
      return {x[0], 0.0, x[1]};
    }
    return {0.0, 0.0, e[2]};
  }
  const double denom0 = e[0] * e[0] - e[2] * e[2];
  const double denom1 = e[1] * e[1] - e[2] * e[2];
  const double numer0 = e[0] * y[0];
  const double numer1 = e[1] * y[1];
  if (numer0 < denom0 && numer1 < denom1) {
    const double xde0 = numer0 / denom0;
    const double xde1 = numer1 / denom1;
    const double discr = 1.0 - xde0 * xde0 - xde1 * xde1;
    if (discr > 0.0) return {e[0] * xde0, e[1] * xde1, e[2] * std::sqrt(discr)};
  }
  const auto x = closest_ellipse(e[0], e[1], y[0], y[1]);
  return {x[0], x[1], 0.0};
}

double ellipsoid_level(const Ellipsoid& e, const Vec3& x) {
  const Vec3 d = x - e.center;
  return d.x * d.x / (e.semi_axes.x * e.semi_axes.x) + d.y * d.y / (e.semi_axes.y * e.semi_axes.y) +
         d.z * d.z / (e.semi_axes.z * e.semi_axes.z);
}

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Vec3 ellipsoid_closest_point(const Ellipsoid& e, const Vec3& x) {
  const Vec3 d = x - e.center;
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return e.semi_axes[a] > e.semi_axes[b]; });
  std::array<double, 3> es{}, ys{};
  for (int i = 0; i < 3; ++i) {
    es[i] = e.semi_axes[order[i]];
    ys[i] = std::abs(d[order[i]]);
  }
  const auto xs = closest_ellipsoid_sorted(es, ys);
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const int axis = order[i];
    out[axis] = std::copysign(xs[i], d[axis]);
  }
  return out + e.center;
}

Shape::Shape(Sphere s) : v_(s) {}
Shape::Shape(Ellipsoid e) : v_(e) {}
Shape::Shape(Box b) : v_(b) {}
Shape::Shape(ShapeUnion u) : v_(std::move(u)) {}

bool Shape::contains(const Vec3& x) const {
  return std::visit(
      overloaded{
          [&](const Sphere& s) { return norm2(x - s.center) < s.radius * s.radius; },
          [&](const Ellipsoid& e) { return ellipsoid_level(e, x) < 1.0; },
          [&](const Box& b) {
            return x.x > b.lo.x && x.x < b.hi.x && x.y > b.lo.y && x.y < b.hi.y && x.z > b.lo.z &&
                   x.z < b.hi.z;
          },
          [&](const ShapeUnion& u) {
            return std::any_of(u.parts.begin(), u.parts.end(),
                               [&](const Shape& s) { return s.contains(x); });
          },
      },
      v_);
}

double Shape::signed_distance(const Vec3& x) const {
  return std::visit(
      overloaded{
          [&](const Sphere& s) { return distance(x, s.center) - s.radius; },
          [&](const Ellipsoid& e) {
            const double d = distance(x, ellipsoid_closest_point(e, x));
            return ellipsoid_level(e, x) < 1.0 ? -d : d;
          },
          [&](const Box& b) {
            Vec3 out;
            double inside = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 3; ++i) {
              out[i] = std::max({b.lo[i] - x[i], 0.0, x[i] - b.hi[i]});
              inside = std::min({inside, x[i] - b.lo[i], b.hi[i] - x[i]});
            }
            const double o = norm(out);
            return o > 0.0 ? o : -inside;
          },
          [&](const ShapeUnion& u) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& s : u.parts) d = std::min(d, s.signed_distance(x));
            return d;
          },
      },
      v_);
}

Vec3 Shape::nearest_boundary_point(const Vec3& x) const {
  return std::visit(
      overloaded{
          [&](const Sphere& s) { return s.center + s.radius * normalized(x - s.center); },
          [&](const Ellipsoid& e) { return ellipsoid_closest_point(e, x); },
          [&](const Box& b) {
            Vec3 q;
            for (int i = 0; i < 3; ++i) q[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
            return q;
          },
          [&](const ShapeUnion& u) {
            Vec3 best;
            double bd = std::numeric_limits<double>::infinity();
            for (const auto& s : u.parts) {
              const Vec3 q = s.nearest_boundary_point(x);
              const double d = distance(q, x);
              if (d < bd) {
                bd = d;
                best = q;
              }
            }
            return best;
          },
      },
      v_);
}

Aabb Shape::bounds() const {
  return std::visit(
      overloaded{
          [&](const Sphere& s) {
            const Vec3 r{s.radius, s.radius, s.radius};
            return Aabb{s.center - r, s.center + r};
          },
          [&](const Ellipsoid& e) { return Aabb{e.center - e.semi_axes, e.center + e.semi_axes}; },
          [&](const Box& b) { return Aabb{b.lo, b.hi}; },
          [&](const ShapeUnion& u) {
            constexpr double inf = std::numeric_limits<double>::infinity();
            Aabb box{{inf, inf, inf}, {-inf, -inf, -inf}};
            for (const auto& s : u.parts) {
              const Aabb b = s.bounds();
              for (int i = 0; i < 3; ++i) {
                box.lo[i] = std::min(box.lo[i], b.lo[i]);
                box.hi[i] = std::max(box.hi[i], b.hi[i]);
              }
            }
            return box;
          },
      },
      v_);
}

bool Shape::is_smooth() const {
  return std::visit(overloaded{
                        [](const Box&) { return false; },
                        [](const ShapeUnion& u) {
                          return std::all_of(u.parts.begin(), u.parts.end(),
                                             [](const Shape& s) { return s.is_smooth(); });
                        },
                        [](const auto&) { return true; },
                    },
                    v_);
}

ImplicitJet implicit_jet(const Sphere& s, const Vec3& x) {
  ImplicitJet j;
  const Vec3 d = x - s.center;
  const double r2 = s.radius * s.radius;
  j.value = norm2(d) / r2 - 1.0;
  j.grad = d * (2.0 / r2);
  for (int i = 0; i < 3; ++i) j.hess[i][i] = 2.0 / r2;
  return j;
}

ImplicitJet implicit_jet(const Ellipsoid& e, const Vec3& x) {
  ImplicitJet j;
  const Vec3 d = x - e.center;
  j.value = ellipsoid_level(e, x) - 1.0;
  for (int i = 0; i < 3; ++i) {
    const double a2 = e.semi_axes[i] * e.semi_axes[i];
    j.grad[i] = 2.0 * d[i] / a2;
    j.hess[i][i] = 2.0 / a2;
  }
  return j;
}

Vec3 halton3(unsigned index) {
  return {radical_inverse(index, 2), radical_inverse(index, 3), radical_inverse(index, 5)};
}

}  // namespace emenc
