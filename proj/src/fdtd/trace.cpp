#include "emenc/fdtd/trace.hpp"

#include <cmath>

#include "emenc/error.hpp"

namespace emenc {

const char* to_string(TraceMode m) {
  switch (m) {
    case TraceMode::total_with_obstacle: return "total_with_obstacle";
    case TraceMode::background: return "background";
    case TraceMode::scattered: return "scattered";
  }
  return "?";
}

TraceMode trace_mode_from_string(const std::string& s) {
  if (s == "total_with_obstacle") return TraceMode::total_with_obstacle;
  if (s == "background") return TraceMode::background;
  if (s == "scattered") return TraceMode::scattered;
  fail(ErrorKind::io, "unknown trace mode '" + s + "'");
}

std::vector<double> TraceRecord::series(std::size_t point, int comp) const {
  std::vector<double> out(samples);
  const std::size_t stride = points.size() * 3;
  for (std::size_t n = 0; n < samples; ++n) out[n] = data[n * stride + point * 3 + comp];
  return out;
}

TraceSampler::TraceSampler(const Lattice& l, const Vec3& p, double eta, int subsamples) {
  const int n = std::max(subsamples, 1);
  const double h = l.h;
  auto cell_lo = [&](double v, double o) { return std::max(0, static_cast<int>(std::floor((v - o) / h)) - 1); };
  const int i0 = cell_lo(p.x - eta, l.origin.x), j0 = cell_lo(p.y - eta, l.origin.y),
            k0 = cell_lo(p.z - eta, l.origin.z);
  const int i1 = std::min(l.nx, static_cast<int>(std::ceil((p.x + eta - l.origin.x) / h)) + 1);
  const int j1 = std::min(l.ny, static_cast<int>(std::ceil((p.y + eta - l.origin.y) / h)) + 1);
  const int k1 = std::min(l.nz, static_cast<int>(std::ceil((p.z + eta - l.origin.z) / h)) + 1);
  double total = 0.0;
  for (int k = k0; k < k1; ++k)
    for (int j = j0; j < j1; ++j)
      for (int i = i0; i < i1; ++i) {
        const Vec3 c = l.origin + Vec3{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
        if (!(distance(c, p) < eta)) continue;
        int inside = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) {
              const Vec3 y = c + Vec3{((a + 0.5) / n - 0.5) * h, ((b + 0.5) / n - 0.5) * h,
                                      ((d + 0.5) / n - 0.5) * h};
              if (norm2(y - p) < eta * eta) ++inside;
            }
        const double w = static_cast<double>(inside) / (n * n * n) * h * h * h;
        points_.push_back(c);
        weights_.push_back(w);
        total += w;
        std::array<std::array<std::size_t, 4>, 3> g;
        g[0] = {l.index(i, j, k), l.index(i, j + 1, k), l.index(i, j, k + 1), l.index(i, j + 1, k + 1)};
        g[1] = {l.index(i, j, k), l.index(i + 1, j, k), l.index(i, j, k + 1), l.index(i + 1, j, k + 1)};
        g[2] = {l.index(i, j, k), l.index(i + 1, j, k), l.index(i, j + 1, k), l.index(i + 1, j + 1, k)};
        gather_.push_back(g);
      }
  if (points_.empty()) fail(ErrorKind::config, "no grid cell centre lies inside the source ball");
  const double scale = (4.0 / 3.0) * M_PI * eta * eta * eta / total;
  for (double& w : weights_) w *= scale;
}

void TraceSampler::record(const FieldState& s, std::vector<double>& out) const {
  for (std::size_t p = 0; p < points_.size(); ++p) {
    for (int c = 0; c < 3; ++c) {
      const auto& g = gather_[p][c];
      const double* e = s.E[c].data();
      out.push_back(0.25 * ((e[g[0]] + e[g[1]]) + (e[g[2]] + e[g[3]])));
    }
  }
}

ProbeSampler::ProbeSampler(const Lattice& l, std::vector<Vec3> points) : points_(std::move(points)) {
  for (const Vec3& x : points_) {
    std::array<Stencil, 3> st;
    for (int c = 0; c < 3; ++c) {
      int base[3];
      double frac[3];
      const int lim[3] = {l.nx, l.ny, l.nz};
      for (int a = 0; a < 3; ++a) {
        const double u = (x[a] - l.origin[a]) / l.h - (a == c ? 0.5 : 0.0);
        const int i = static_cast<int>(std::floor(u));
        if (i < 0 || i + 1 > lim[a] - (a == c ? 1 : 0))
          fail(ErrorKind::config, "probe point lies outside the grid interior");
        base[a] = i;
        frac[a] = u - i;
      }
      for (int corner = 0; corner < 8; ++corner) {
        const int di = corner & 1, dj = (corner >> 1) & 1, dk = (corner >> 2) & 1;
        st[c].idx[corner] = l.index(base[0] + di, base[1] + dj, base[2] + dk);
        st[c].w[corner] = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                          (dk ? frac[2] : 1.0 - frac[2]);
      }
    }
    stencils_.push_back(st);
  }
}

void ProbeSampler::record(const FieldState& s, std::vector<double>& out) const {
  for (const auto& st : stencils_) {
    for (int c = 0; c < 3; ++c) {
      const double* e = s.E[c].data();
      double v = 0.0;
      for (int q = 0; q < 8; ++q) v += st[c].w[q] * e[st[c].idx[q]];
      out.push_back(v);
    }
  }
}

}  // namespace emenc
