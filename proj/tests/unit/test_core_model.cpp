#include <doctest.h>

#include <cmath>
#include <random>

#include "emenc/error.hpp"
#include "emenc/log_value.hpp"
#include "emenc/medium.hpp"
#include "emenc/reflector.hpp"
#include "emenc/shape.hpp"

using namespace emenc;

namespace {

ObstacleSpec homogeneous(double eps_r, double mu_r, double h = 0.0) {
  return ObstacleSpec{Shape(Sphere{{1, 0, 0}, 0.25}), eps_r - 1.0, mu_r - 1.0, h};
}

// Second fundamental form of the implicit surface by central differences of the unit normal
// field N = grad F / |grad F| along tangent directions.
ShapeOperator fd_shape_operator(const Ellipsoid& e, const Vec3& q) {
  auto F = [&](const Vec3& x) {
    const Vec3 d = x - e.center;
    return d.x * d.x / (e.semi_axes.x * e.semi_axes.x) +
           d.y * d.y / (e.semi_axes.y * e.semi_axes.y) +
           d.z * d.z / (e.semi_axes.z * e.semi_axes.z) - 1.0;
  };
  const double hd = 1e-5;
  auto grad = [&](const Vec3& x) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
      Vec3 dp = x, dm = x;
      dp[i] += hd;
      dm[i] -= hd;
      g[i] = (F(dp) - F(dm)) / (2 * hd);
    }
    return g;
  };
  ShapeOperator s;
  s.normal = normalized(grad(q));
  s.tangent[0] = any_orthogonal(s.normal);
  s.tangent[1] = cross(s.normal, s.tangent[0]);
  const double step = 1e-4;
  for (int j = 0; j < 2; ++j) {
    const Vec3 np = normalized(grad(q + s.tangent[j] * step));
    const Vec3 nm = normalized(grad(q - s.tangent[j] * step));
    const Vec3 dn = (np - nm) / (2 * step);
    for (int i = 0; i < 2; ++i) s.m[i][j] = -dot(s.tangent[i], dn);
  }
  return s;
}

}  // namespace

TEST_CASE("classify_material on homogeneous obstacles") {
  const BackgroundMedium bg;
  auto c = classify_material(homogeneous(2.0, 1.0), bg);
  CHECK(c.cls == MaterialClass::A_I);
  CHECK(c.margin == doctest::Approx(0.5).epsilon(1e-15));

  c = classify_material(homogeneous(1.0, 1.0), bg);
  CHECK(c.cls == MaterialClass::neither);
  CHECK(c.margin == 0.0);

  c = classify_material(homogeneous(0.4, 1.0), bg);
  CHECK(c.cls == MaterialClass::A_II);
  CHECK(c.margin == doctest::Approx(0.6).epsilon(1e-14));

  c = classify_material(homogeneous(3.0, 0.8), bg);
  CHECK(c.cls == MaterialClass::A_I);
  CHECK(c.margin == doctest::Approx(2.0 / 3.0 + 0.2).epsilon(1e-14));
}

TEST_CASE("classify_material rejects non-positive coefficients") {
  const BackgroundMedium bg;
  try {
    classify_material(homogeneous(-0.1, 1.0), bg);
    FAIL("expected invalid_material");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_material);
  }
  CHECK_THROWS_AS(classify_material(homogeneous(1.0, 0.0), bg), Error);
}

TEST_CASE("classify_material samples callable fields") {
  const BackgroundMedium bg;
  ObstacleSpec ob{Shape(Sphere{{0, 0, 0}, 1.0}),
                  MaterialField([](const Vec3& x) { return 1.0 + 0.5 * x.x; }), 0.0, 0.0};
  const auto c = classify_material(ob, bg);
  CHECK(c.cls == MaterialClass::A_I);
  // inf of 1 - 1/eps_r over the ball is approached near x = -1, eps_r = 1.5
  CHECK(c.margin > 1.0 - 1.0 / 1.5);
  CHECK(c.margin < 1.0 - 1.0 / 1.52);
}

TEST_CASE("region_membership") {
  CHECK(region_membership(1.0, 1.0) == Region::boundary);
  CHECK(region_membership(2.5, 1.5) == Region::A1);
  CHECK(region_membership(1.5, 2.5) == Region::A2);
  CHECK(region_membership(0.3, 0.3) == Region::outside_both);
  CHECK_THROWS_AS(region_membership(0.0, 1.0), Error);
}

TEST_CASE("region_membership agrees with classify_material and Phi swaps the regions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.05, 5.0);
  const BackgroundMedium bg;
  int a1 = 0, a2 = 0;
  for (int i = 0; i < 20000; ++i) {
    const double er = U(rng), mr = U(rng);
    const Region r = region_membership(er, mr);
    const auto c = classify_material(homogeneous(er, mr), bg);
    if (r == Region::A1) {
      ++a1;
      CHECK(c.cls == MaterialClass::A_I);
      CHECK(region_membership(1.0 / er, 1.0 / mr) == Region::A2);
    } else if (r == Region::A2) {
      ++a2;
      CHECK(c.cls == MaterialClass::A_II);
      CHECK(region_membership(1.0 / er, 1.0 / mr) == Region::A1);
    } else {
      CHECK(c.cls == MaterialClass::neither);
    }
  }
  CHECK(a1 > 1000);
  CHECK(a2 > 1000);
}

TEST_CASE("dist_D_B") {
  const Vec3 p{0, 0, 0};
  CHECK(dist_D_B(Shape(Sphere{{1, 0, 0}, 0.25}), p, 0.05) == doctest::Approx(0.70).epsilon(1e-14));
  CHECK(dist_D_B(Shape(Box{{1, 1, 1}, {2, 2, 2}}), p, 0.1) ==
        doctest::Approx(std::sqrt(3.0) - 0.1).epsilon(1e-14));
  const Shape u(ShapeUnion{{Shape(Sphere{{1, 0, 0}, 0.25}), Shape(Sphere{{0, -0.6, 0}, 0.2})}});
  CHECK(dist_D_B(u, p, 0.05) == doctest::Approx(0.35).epsilon(1e-14));
  try {
    dist_D_B(Shape(Sphere{{0.3, 0, 0}, 0.25}), p, 0.1);
    FAIL("expected geometry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::geometry);
    CHECK(exit_code_for(e.kind()) == 2);
  }
}

TEST_CASE("signed distance is 1-Lipschitz") {
  const Shape shapes[] = {
      Shape(Sphere{{0.1, 0, 0}, 0.5}), Shape(Ellipsoid{{0, 0.2, 0}, {0.8, 0.4, 0.3}}),
      Shape(Box{{-0.3, -0.2, -0.1}, {0.4, 0.5, 0.2}}),
      Shape(ShapeUnion{{Shape(Sphere{{0.5, 0, 0}, 0.3}), Shape(Box{{-1, -0.1, -0.1}, {0, 0.1, 0.1}})}})};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (const auto& s : shapes) {
    for (int i = 0; i < 4000; ++i) {
      const Vec3 x{U(rng), U(rng), U(rng)}, y{U(rng), U(rng), U(rng)};
      CHECK(std::abs(s.signed_distance(x) - s.signed_distance(y)) <= distance(x, y) * (1 + 1e-12));
    }
  }
}

TEST_CASE("ellipsoid closest point satisfies the normal-line condition") {
  const Ellipsoid e{{0.1, -0.2, 0.3}, {1.3, 0.7, 0.4}};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int i = 0; i < 500; ++i) {
    const Vec3 x{U(rng), U(rng), U(rng)};
    if (Shape(e).contains(x)) continue;
    const Vec3 q = ellipsoid_closest_point(e, x);
    const auto jet = implicit_jet(e, q);
    CHECK(std::abs(jet.value) < 1e-12);
    CHECK(norm(cross(normalized(jet.grad), x - q)) < 1e-9 * (1 + norm(x - q)));
  }
}

TEST_CASE("first_reflector on a sphere") {
  const Sphere s{{1.0, 0.5, -0.2}, 0.3};
  const Vec3 p{-0.4, 0.1, 0.6};
  const double L = distance(p, s.center);
  const auto rep = first_reflector(Shape(s), p, normalized(Vec3{0, 1, 1}));
  REQUIRE(rep.points.size() == 1);
  const auto& q = rep.points[0];
  CHECK(std::abs(distance(q.q, p) + s.radius - L) < 1e-12);
  CHECK(rep.dist_pD == doctest::Approx(L - s.radius).epsilon(1e-13));
  CHECK(q.gauss == doctest::Approx(1 / (s.radius * s.radius)).epsilon(1e-13));
  CHECK(q.mean == doctest::Approx(-1 / s.radius).epsilon(1e-13));
  const double lam = rep.lambda;
  CHECK(q.det_diff == doctest::Approx(lam * lam - 2 * lam * q.mean + q.gauss).epsilon(1e-10));
  CHECK(q.det_diff == doctest::Approx((lam + 1 / s.radius) * (lam + 1 / s.radius)).epsilon(1e-10));
  CHECK(rep.flags.b1);
  CHECK(rep.flags.b2);
  CHECK(rep.flags.b3);

  const auto along = first_reflector(Shape(s), p, normalized(s.center - p));
  CHECK_FALSE(along.flags.b3);
}

TEST_CASE("first_reflector on an ellipsoid against the finite-difference oracle") {
  const Ellipsoid e{{0, 0, 0}, {2, 1, 1}};
  const auto rep = first_reflector(Shape(e), {5, 0, 0}, {0, 0, 1});
  REQUIRE(rep.points.size() == 1);
  const auto& q = rep.points[0];
  CHECK(distance(q.q, Vec3{2, 0, 0}) < 1e-9);
  CHECK(q.gauss == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(q.mean == doctest::Approx(-2.0).epsilon(1e-12));
  const auto fd = fd_shape_operator(e, q.q);
  CHECK(fd.gauss() == doctest::Approx(q.gauss).epsilon(1e-5));
  CHECK(fd.mean() == doctest::Approx(q.mean).epsilon(1e-5));
  const double lam = rep.lambda;
  CHECK(q.det_diff == doctest::Approx(lam * lam - 2 * lam * q.mean + q.gauss).epsilon(1e-10));
}

TEST_CASE("first_reflector at a generic ellipsoid point") {
  const Ellipsoid e{{0.2, -0.1, 0.05}, {0.9, 0.5, 0.35}};
  const Vec3 p{1.7, 1.1, -0.9};
  const auto rep = first_reflector(Shape(e), p, {1, 0, 0});
  REQUIRE(rep.points.size() == 1);
  const auto& q = rep.points[0];
  CHECK(distance(q.q, ellipsoid_closest_point(e, p)) < 1e-8);
  const auto fd = fd_shape_operator(e, q.q);
  CHECK(fd.gauss() == doctest::Approx(q.gauss).epsilon(1e-5));
  CHECK(fd.mean() == doctest::Approx(q.mean).epsilon(1e-5));
  const double lam = rep.lambda;
  CHECK(q.det_diff == doctest::Approx(lam * lam - 2 * lam * q.mean + q.gauss).epsilon(1e-10));
}

TEST_CASE("first_reflector finds both points of a symmetric configuration") {
  const Shape u(ShapeUnion{{Shape(Sphere{{1, 0.5, 0}, 0.2}), Shape(Sphere{{1, -0.5, 0}, 0.2})}});
  const auto rep = first_reflector(u, {0, 0, 0}, {0, 0, 1});
  CHECK(rep.points.size() == 2);
  const auto el = first_reflector(Shape(Ellipsoid{{0, 0, 0}, {0.5, 2.0, 0.5}}), {3, 0, 0}, {0, 1, 0});
  CHECK(el.points.size() == 1);
}

TEST_CASE("first_reflector errors") {
  try {
    first_reflector(Shape(Box{{1, 1, 1}, {2, 2, 2}}), {0, 0, 0}, {0, 0, 1});
    FAIL("expected unsupported_geometry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_geometry);
  }
  try {
    first_reflector(Shape(Sphere{{0, 0, 0}, 1}), {0.5, 0, 0}, {0, 0, 1});
    FAIL("expected geometry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::geometry);
  }
}

TEST_CASE("LogValue arithmetic") {
  const auto a = LogValue::from_double(3.0), b = LogValue::from_double(-5.0);
  CHECK((a + b).to_double() == doctest::Approx(-2.0));
  CHECK((a * b).to_double() == doctest::Approx(-15.0));
  CHECK((a - a).is_zero());
  const auto tiny = LogValue::from_log(-2000.0, -1);
  const auto sum = tiny + LogValue::from_log(-2000.0 + std::log(3.0), 1);
  CHECK(sum.sign == 1);
  CHECK(sum.log_abs == doctest::Approx(-2000.0 + std::log(2.0)));
}
