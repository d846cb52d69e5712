#include "emenc/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "emenc/error.hpp"

namespace emenc {

double BackgroundMedium::wave_speed() const { return 1.0 / std::sqrt(eps0 * mu0); }

void BackgroundMedium::validate() const {
  if (!(eps0 > 0.0) || !(mu0 > 0.0) || !(sigma0 >= 0.0) || !std::isfinite(eps0) ||
      !std::isfinite(mu0) || !std::isfinite(sigma0)) {
    std::ostringstream os;
    os << "background medium requires eps0 > 0, mu0 > 0, sigma0 >= 0 (got " << eps0 << ", " << mu0
       << ", " << sigma0 << ")";
    fail(ErrorKind::invalid_material, os.str());
  }
}

std::vector<Vec3> interior_samples(const Shape& shape, int count) {
  const Aabb box = shape.bounds();
  const Vec3 ext = box.hi - box.lo;
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  const unsigned max_tries = 1000u * static_cast<unsigned>(count) + 1000u;
  for (unsigned i = 1; i < max_tries && static_cast<int>(out.size()) < count; ++i) {
    const Vec3 u = halton3(i);
    const Vec3 x = box.lo + hadamard(u, ext);
    if (shape.contains(x)) out.push_back(x);
  }
  if (out.empty()) fail(ErrorKind::geometry, "shape has no sampled interior points");
  return out;
}

void ObstacleSpec::validate(const BackgroundMedium& bg) const {
  auto check = [&](double er, double mr, double h) {
    if (!(er > 0.0) || !(mr > 0.0)) {
      std::ostringstream os;
      os << "relative permittivity/permeability must be positive (eps_r = " << er
         << ", mu_r = " << mr << ")";
      fail(ErrorKind::invalid_material, os.str());
    }
    if (!(bg.sigma0 + h >= 0.0)) fail(ErrorKind::invalid_material, "negative conductivity on D");
  };
  if (piecewise_constant()) {
    check(1.0 + e_pert.constant(), 1.0 + m_pert.constant(), h_pert.constant());
    return;
  }
  for (const Vec3& x : interior_samples(shape, kMaterialSamples)) check(eps_r(x), mu_r(x), h_pert(x));
}

const char* to_string(MaterialClass c) {
  switch (c) {
    case MaterialClass::A_I: return "A_I";
    case MaterialClass::A_II: return "A_II";
    case MaterialClass::neither: return "neither";
  }
  return "?";
}

JumpMargins jump_margins(const ObstacleSpec& obstacle) {
  auto lhs1 = [](double er, double mr) { return (1.0 - 1.0 / er) + (1.0 - mr); };
  auto lhs2 = [](double er, double mr) { return (1.0 - er) + (1.0 - 1.0 / mr); };
  if (obstacle.piecewise_constant()) {
    const double er = 1.0 + obstacle.e_pert.constant();
    const double mr = 1.0 + obstacle.m_pert.constant();
    return {lhs1(er, mr), lhs2(er, mr)};
  }
  JumpMargins m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const Vec3& x : interior_samples(obstacle.shape, kMaterialSamples)) {
    const double er = obstacle.eps_r(x), mr = obstacle.mu_r(x);
    m.a1 = std::min(m.a1, lhs1(er, mr));
    m.a2 = std::min(m.a2, lhs2(er, mr));
  }
  return m;
}

MaterialClassification classify_material(const ObstacleSpec& obstacle,
                                         const BackgroundMedium& bg) {
  bg.validate();
  obstacle.validate(bg);
  const JumpMargins m = jump_margins(obstacle);
  if (m.a1 > 0.0) return {MaterialClass::A_I, m.a1};
  if (m.a2 > 0.0) return {MaterialClass::A_II, m.a2};
  return {MaterialClass::neither, std::max(m.a1, m.a2)};
}

const char* to_string(Region r) {
  switch (r) {
    case Region::A1: return "A1";
    case Region::A2: return "A2";
    case Region::boundary: return "boundary";
    case Region::outside_both: return "outside_both";
  }
  return "?";
}

Region region_membership(double eps_r, double mu_r) {
  if (!(eps_r > 0.0) || !(mu_r > 0.0))
    fail(ErrorKind::invalid_material, "region_membership requires eps_r > 0 and mu_r > 0");
  // Plane coordinates (x, y) = (mu_r, eps_r).
  const double x = mu_r;
  const double y = eps_r;
  if (x < 2.0) {
    const double edge = 1.0 / (2.0 - x);
    if (y > edge) return Region::A1;
    if (y == edge) return Region::boundary;
  }
  if (x > 0.5) {
    const double edge = 2.0 - 1.0 / x;
    if (y < edge) return Region::A2;
    if (y == edge) return Region::boundary;
  }
  return Region::outside_both;
}

double dist_D_B(const Shape& shape, const Vec3& p, double eta) {
  if (!(eta > 0.0)) fail(ErrorKind::geometry, "source radius eta must be positive");
  const double d = shape.signed_distance(p);
  if (!(d - eta > 0.0)) {
    std::ostringstream os;
    os << "source ball B(p, " << eta << ") meets the obstacle closure (dist(p, dD) = " << d << ")";
    fail(ErrorKind::geometry, os.str());
  }
  return d - eta;
}

}  // namespace emenc
