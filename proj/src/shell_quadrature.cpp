#include "emenc/shell_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <variant>

#include "emenc/error.hpp"

namespace emenc {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const unsigned un = static_cast<unsigned>(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      const double pn = std::legendre(un, x), pm = std::legendre(un - 1, x);
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double pn = std::legendre(un, x), pm = std::legendre(un - 1, x);
    dp = n * (x * pn - pm) / (x * x - 1.0);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

namespace {

using Intervals = std::vector<std::pair<double, double>>;

void quadric_interval(double a, double b, double c, Intervals& out) {
  // a r^2 + 2 b r + c < 0
  const double disc = b * b - a * c;
  if (disc <= 0.0) return;
  const double sq = std::sqrt(disc);
  const double q = -(b + std::copysign(sq, b));
  double r0 = q / a, r1 = c / q;
  if (r0 > r1) std::swap(r0, r1);
  r0 = std::max(r0, 0.0);
  if (r1 > r0) out.push_back({r0, r1});
}

void collect(const Shape& s, const Vec3& p, const Vec3& w, Intervals& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          const Vec3 d = p - v.center;
          quadric_interval(1.0, dot(d, w), norm2(d) - v.radius * v.radius, out);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          Vec3 d, ws;
          for (int a = 0; a < 3; ++a) {
            d[a] = (p[a] - v.center[a]) / v.semi_axes[a];
            ws[a] = w[a] / v.semi_axes[a];
          }
          quadric_interval(norm2(ws), dot(d, ws), norm2(d) - 1.0, out);
        } else if constexpr (std::is_same_v<T, Box>) {
          double r0 = 0.0, r1 = std::numeric_limits<double>::infinity();
          for (int a = 0; a < 3; ++a) {
            if (w[a] == 0.0) {
              if (p[a] <= v.lo[a] || p[a] >= v.hi[a]) return;
              continue;
            }
            double t0 = (v.lo[a] - p[a]) / w[a], t1 = (v.hi[a] - p[a]) / w[a];
            if (t0 > t1) std::swap(t0, t1);
            r0 = std::max(r0, t0);
            r1 = std::min(r1, t1);
          }
          if (r1 > r0) out.push_back({r0, r1});
        } else {
          for (const Shape& part : v.parts) collect(part, p, w, out);
        }
      },
      s.variant());
}

Intervals merged(Intervals iv) {
  std::sort(iv.begin(), iv.end());
  Intervals out;
  for (const auto& x : iv) {
    if (!out.empty() && x.first <= out.back().second)
      out.back().second = std::max(out.back().second, x.second);
    else
      out.push_back(x);
  }
  return out;
}

Vec3 cone_axis_and_angle(const Shape& shape, const Vec3& p, double& half_angle) {
  Vec3 c;
  double R;
  if (const auto* s = std::get_if<Sphere>(&shape.variant())) {
    c = s->center;
    R = s->radius;
  } else {
    const Aabb b = shape.bounds();
    c = (b.lo + b.hi) * 0.5;
    R = 0.5 * b.diagonal();
  }
  const double dc = distance(c, p);
  half_angle = dc > R ? std::asin(std::min(1.0, R / dc)) : M_PI;
  return dc > 0.0 ? (c - p) / dc : Vec3{0, 0, 1};
}

double integrate(const Shape& shape, const Vec3& p, double rate, double r_min,
                 const std::function<double(double, const Vec3&)>& g, int nt, int nphi, int nr) {
  double half;
  const Vec3 axis = cone_axis_and_angle(shape, p, half);
  const Vec3 e1 = any_orthogonal(axis);
  const Vec3 e2 = cross(axis, e1);
  const GaussRule& gt = gauss_legendre(nt);
  const GaussRule& gr = gauss_legendre(nr);
  double total = 0.0;
  for (int it = 0; it < nt; ++it) {
    // theta = half (1 - s^2), s in [0, 1]: smooths the sqrt edge of a cap-shaped shadow
    const double s = 0.5 * (gt.x[it] + 1.0);
    const double theta = half * (1.0 - s * s);
    const double jac_t = 0.5 * gt.w[it] * 2.0 * half * s * std::sin(theta);
    double ring = 0.0;
    for (int ip = 0; ip < nphi; ++ip) {
      const double ph = 2.0 * M_PI * (ip + 0.5) / nphi;
      const Vec3 w = axis * std::cos(theta) + (e1 * std::cos(ph) + e2 * std::sin(ph)) * std::sin(theta);
      for (const auto& [r0, r1] : merged([&] {
             Intervals iv;
             collect(shape, p, w, iv);
             return iv;
           }())) {
        // composite rule on chunks of 4 / rate, truncated where the weight drops below e^{-40}
        const double L = rate > 0.0 ? std::min(r1 - r0, 40.0 / rate) : r1 - r0;
        const int chunks = rate > 0.0 ? std::max(1, static_cast<int>(std::ceil(L * rate / 4.0))) : 1;
        const double len = L / chunks;
        double seg = 0.0;
        for (int c = 0; c < chunks; ++c) {
          const double a = c * len;
          for (int q = 0; q < nr; ++q) {
            const double sq = a + 0.5 * len * (gr.x[q] + 1.0);
            const double r = r0 + sq;
            seg += 0.5 * len * gr.w[q] * std::exp(-rate * sq) * r * r * g(r, w);
          }
        }
        ring += seg * std::exp(-rate * (r0 - r_min));
      }
    }
    total += jac_t * ring * (2.0 * M_PI / nphi);
  }
  return total;
}

}  // namespace

std::vector<std::pair<double, double>> ray_intervals(const Shape& shape, const Vec3& p, const Vec3& w) {
  Intervals iv;
  collect(shape, p, w, iv);
  return merged(std::move(iv));
}

ShellIntegral shell_integral(const Shape& shape, const Vec3& p, double rate,
                             const std::function<double(double r, const Vec3& n)>& g,
                             const ShellQuadOptions& opt) {
  const double r_min = shape.signed_distance(p);
  if (!(r_min > 0.0)) fail(ErrorKind::geometry, "shell quadrature needs p outside the closure of D");
  ShellIntegral out;
  out.log_offset = -rate * r_min;
  out.value = integrate(shape, p, rate, r_min, g, opt.n_theta, opt.n_phi, opt.n_radial);
  if (opt.rel_tol > 0.0) {
    const double fine = integrate(shape, p, rate, r_min, g, opt.n_theta * 3 / 2, opt.n_phi * 3 / 2,
                                  opt.n_radial * 3 / 2);
    const double scale = std::max(std::abs(fine), std::abs(out.value));
    out.refined_rel_diff = scale > 0.0 ? std::abs(fine - out.value) / scale : 0.0;
    if (out.refined_rel_diff > opt.rel_tol) {
      std::ostringstream os;
      os << "shell quadrature did not converge (refined rule differs by " << out.refined_rel_diff
         << " relative); raise n_theta / n_phi / n_radial";
      fail(ErrorKind::accuracy, os.str());
    }
    out.value = fine;
  }
  return out;
}

}  // namespace emenc
