#include "emenc/reflector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "emenc/error.hpp"

namespace emenc {

namespace {

using Primitive = std::variant<Sphere, Ellipsoid>;

void flatten(const Shape& s, std::vector<Primitive>& out) {
  const auto& v = s.variant();
  if (const auto* sp = std::get_if<Sphere>(&v)) {
    out.emplace_back(*sp);
  } else if (const auto* el = std::get_if<Ellipsoid>(&v)) {
    out.emplace_back(*el);
  } else if (const auto* u = std::get_if<ShapeUnion>(&v)) {
    for (const auto& part : u->parts) flatten(part, out);
  } else {
    fail(ErrorKind::unsupported_geometry,
         "first_reflector needs a C^2 boundary; box shapes are not supported");
  }
}

Vec3 center_of(const Primitive& p) {
  return std::visit([](const auto& s) { return s.center; }, p);
}

Vec3 axes_of(const Primitive& p) {
  if (const auto* s = std::get_if<Sphere>(&p)) return {s->radius, s->radius, s->radius};
  return std::get<Ellipsoid>(p).semi_axes;
}

ImplicitJet jet_of(const Primitive& p, const Vec3& x) {
  return std::visit([&](const auto& s) { return implicit_jet(s, x); }, p);
}

// Local minimizer of |c + A u - p|^2 over unit vectors u, Barzilai-Borwein projected gradient.
Vec3 descend(const Vec3& c, const Vec3& axes, const Vec3& p, Vec3 u) {
  auto tangent_grad = [&](const Vec3& w) {
    const Vec3 g = hadamard(axes, c + hadamard(axes, w) - p) * 2.0;
    return g - w * dot(g, w);
  };
  const double scale = std::max({axes.x, axes.y, axes.z});
  Vec3 g = tangent_grad(u);
  double step = 0.1 / (scale * scale);
  for (int it = 0; it < 20000; ++it) {
    if (norm(g) < 1e-15 * scale * (scale + distance(c, p))) break;
    const Vec3 un = normalized(u - g * step);
    const Vec3 gn = tangent_grad(un);
    const Vec3 s = un - u;
    const Vec3 y = gn - g;
    const double sy = dot(s, y);
    step = sy > 0.0 ? dot(s, s) / sy : 0.1 / (scale * scale);
    step = std::min(step, 1.0 / (scale * scale));
    if (norm(s) == 0.0) break;
    u = un;
    g = gn;
  }
  return u;
}

// Analytic curvatures.
void closed_form_curvature(const Primitive& prim, const Vec3& q, double& K, double& H) {
  if (const auto* s = std::get_if<Sphere>(&prim)) {
    K = 1.0 / (s->radius * s->radius);
    H = -1.0 / s->radius;
    return;
  }
  const auto& e = std::get<Ellipsoid>(prim);
  const Vec3 d = q - e.center;
  const double a2 = e.semi_axes.x * e.semi_axes.x;
  const double b2 = e.semi_axes.y * e.semi_axes.y;
  const double c2 = e.semi_axes.z * e.semi_axes.z;
  const double w = d.x * d.x / (a2 * a2) + d.y * d.y / (b2 * b2) + d.z * d.z / (c2 * c2);
  K = 1.0 / (a2 * b2 * c2 * w * w);
  H = -(a2 + b2 + c2 - norm2(d)) / (2.0 * a2 * b2 * c2 * std::pow(w, 1.5));
}

struct Candidate {
  Vec3 q;
  double dist;
  std::size_t prim;
};

}  // namespace

ShapeOperator shape_operator(const ImplicitJet& jet) {
  ShapeOperator s;
  const double gn = norm(jet.grad);
  s.normal = jet.grad / gn;
  s.tangent[0] = any_orthogonal(s.normal);
  s.tangent[1] = cross(s.normal, s.tangent[0]);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double v = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) v += s.tangent[i][r] * jet.hess[r][c] * s.tangent[j][c];
      s.m[i][j] = -v / gn;
    }
  }
  return s;
}

ReflectorReport first_reflector(const Shape& shape, const Vec3& p, const Vec3& a,
                                const ReflectorOptions& opts) {
  std::vector<Primitive> prims;
  flatten(shape, prims);
  if (!(shape.signed_distance(p) > 0.0))
    fail(ErrorKind::geometry, "first_reflector: p must lie outside the closure of D");

  const double diam = shape.diameter();
  const double cluster_tol = opts.cluster_rel_tol * diam;

  std::vector<Candidate> cands;
  const int n = std::max(opts.seeds, 1);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < prims.size(); ++k) {
    const Vec3 c = center_of(prims[k]);
    const Vec3 ax = axes_of(prims[k]);
    if (const auto* s = std::get_if<Sphere>(&prims[k])) {
      const Vec3 q = s->center + s->radius * normalized(p - s->center);
      cands.push_back({q, distance(q, p), k});
      continue;
    }
    const Vec3 exact = ellipsoid_closest_point(std::get<Ellipsoid>(prims[k]), p);
    cands.push_back({exact, distance(exact, p), k});
    for (int i = 0; i < n; ++i) {
      // Fibonacci lattice on the unit sphere as seeds.
      const double zz = 1.0 - 2.0 * (i + 0.5) / n;
      const double rr = std::sqrt(std::max(0.0, 1.0 - zz * zz));
      const Vec3 u0{rr * std::cos(golden * i), rr * std::sin(golden * i), zz};
      const Vec3 u = descend(c, ax, p, u0);
      const Vec3 q = c + hadamard(ax, u);
      cands.push_back({q, distance(q, p), k});
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& cd : cands) best = std::min(best, cd.dist);
  const double dist_tol = std::max(1e-12 * best, 1e-3 * cluster_tol * cluster_tol / best);

  std::vector<Candidate> kept;
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& l, const Candidate& r) { return l.dist < r.dist; });
  for (const auto& cd : cands) {
    if (cd.dist > best + dist_tol) break;
    // Points inside another component are not on dD.
    bool buried = false;
    for (std::size_t k = 0; k < prims.size() && !buried; ++k) {
      if (k == cd.prim) continue;
      buried = std::visit([&](const auto& s) { return Shape(s).contains(cd.q); }, prims[k]);
    }
    if (buried) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Candidate& o) {
      return distance(o.q, cd.q) <= cluster_tol;
    });
    if (!dup) kept.push_back(cd);
  }

  ReflectorReport rep;
  rep.dist_pD = best;
  rep.lambda = 1.0 / best;
  rep.flags.b1 = true;
  rep.flags.b2 = true;
  rep.flags.b3 = false;
  for (const auto& cd : kept) {
    ReflectorPoint pt;
    pt.q = cd.q;
    const ShapeOperator so = shape_operator(jet_of(prims[cd.prim], cd.q));
    pt.nu = so.normal;
    closed_form_curvature(prims[cd.prim], cd.q, pt.gauss, pt.mean);
    pt.det_diff = so.relative_det(rep.lambda);
    rep.flags.b1 = rep.flags.b1 && pt.gauss > 0.0;
    rep.flags.b2 = rep.flags.b2 && pt.det_diff > 0.0;
    if (norm(cross(a, pt.nu)) > opts.normal_tol) rep.flags.b3 = true;
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace emenc
