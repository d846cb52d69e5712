#include "emenc/fdtd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emenc/error.hpp"
#include "emenc/parallel.hpp"

namespace emenc {

namespace {

struct Range {
  int i0, i1, j0, j1, k0, k1;
};

// Sites updated by the curl kernels. Tangential E on the outer faces is excluded (PEC, or set
// by the Mur pass).
Range e_update_range(const Lattice& l, int c) {
  switch (c) {
    case 0: return {0, l.nx, 1, l.ny, 1, l.nz};
    case 1: return {1, l.nx, 0, l.ny, 1, l.nz};
    default: return {1, l.nx, 1, l.ny, 0, l.nz};
  }
}

Range h_update_range(const Lattice& l, int c) {
  switch (c) {
    case 0: return {0, l.nx + 1, 0, l.ny, 0, l.nz};
    case 1: return {0, l.nx, 0, l.ny + 1, 0, l.nz};
    default: return {0, l.nx, 0, l.ny, 0, l.nz + 1};
  }
}

// All sites that exist for a component, boundary included.
Range e_site_range(const Lattice& l, int c) {
  switch (c) {
    case 0: return {0, l.nx, 0, l.ny + 1, 0, l.nz + 1};
    case 1: return {0, l.nx + 1, 0, l.ny, 0, l.nz + 1};
    default: return {0, l.nx + 1, 0, l.ny + 1, 0, l.nz};
  }
}

struct Stencil {
  int a;
  std::ptrdiff_t a1, a0;
  int b;
  std::ptrdiff_t b1, b0;
};

Stencil e_stencil(const Lattice& l, int c) {
  const auto sx = static_cast<std::ptrdiff_t>(l.sx), sy = static_cast<std::ptrdiff_t>(l.sy);
  switch (c) {
    case 0: return {2, 0, -sx, 1, 0, -sy};
    case 1: return {0, 0, -sy, 2, 0, -1};
    default: return {1, 0, -1, 0, 0, -sx};
  }
}

Stencil h_stencil(const Lattice& l, int c) {
  const auto sx = static_cast<std::ptrdiff_t>(l.sx), sy = static_cast<std::ptrdiff_t>(l.sy);
  switch (c) {
    case 0: return {2, sx, 0, 1, sy, 0};
    case 1: return {0, sy, 0, 2, 1, 0};
    default: return {1, 1, 0, 0, sx, 0};
  }
}

void sweep(const Lattice& l, const Range& r, const Stencil& st, double* out,
           const std::array<std::vector<double>, 3>& src, const CoeffField* ca,
           const CoeffField& cb, const kernels::Table& kt, int threads) {
  const double* A = src[st.a].data();
  const double* B = src[st.b].data();
  parallel_slabs(threads, r.k0, r.k1, [&](int k_lo, int k_hi) {
    kernels::CurlRow row;
    row.n = static_cast<std::size_t>(r.i1 - r.i0);
    row.ca_u = ca ? ca->uniform : 1.0;
    row.cb_u = cb.uniform;
    for (int k = k_lo; k < k_hi; ++k) {
      for (int j = r.j0; j < r.j1; ++j) {
        const std::size_t base = l.index(r.i0, j, k);
        row.out = out + base;
        row.a1 = A + base + st.a1;
        row.a0 = A + base + st.a0;
        row.b1 = B + base + st.b1;
        row.b0 = B + base + st.b0;
        row.ca = (ca && ca->data()) ? ca->data() + base : nullptr;
        row.cb = cb.data() ? cb.data() + base : nullptr;
        kt.curl_row(row);
      }
    }
  });
}

MaterialSample averaged(const MediumModel& m, const Vec3& x, double h, int n) {
  MaterialSample acc{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const Vec3 y = x + Vec3{((a + 0.5) / n - 0.5) * h, ((b + 0.5) / n - 0.5) * h,
                                ((c + 0.5) / n - 0.5) * h};
        const MaterialSample s = m.at(y);
        acc.eps += s.eps;
        acc.mu += s.mu;
        acc.sigma += s.sigma;
      }
  const double inv = 1.0 / (n * n * n);
  return {acc.eps * inv, acc.mu * inv, acc.sigma * inv};
}

Range clip_to_box(const Lattice& l, const Range& r, const Aabb& box) {
  auto lo = [&](double v, double o) { return static_cast<int>(std::floor((v - o) / l.h)) - 1; };
  auto hi = [&](double v, double o) { return static_cast<int>(std::ceil((v - o) / l.h)) + 2; };
  Range out = r;
  out.i0 = std::max(r.i0, lo(box.lo.x, l.origin.x));
  out.i1 = std::min(r.i1, hi(box.hi.x, l.origin.x));
  out.j0 = std::max(r.j0, lo(box.lo.y, l.origin.y));
  out.j1 = std::min(r.j1, hi(box.hi.y, l.origin.y));
  out.k0 = std::max(r.k0, lo(box.lo.z, l.origin.z));
  out.k1 = std::min(r.k1, hi(box.hi.z, l.origin.z));
  return out;
}

// Samples eps/sigma (electric) or mu (magnetic) at every site of component c.
void sample_component(const Lattice& l, const MediumModel& m, const GridSpec& g, bool magnetic,
                      int c, CoeffField& f0, CoeffField* f1) {
  const bool uniform_bg = !m.background_field;
  const MaterialSample bg = m.background_at(l.origin);
  auto pick0 = [&](const MaterialSample& s) { return magnetic ? s.mu : s.eps; };
  if (uniform_bg && !m.obstacle) {
    f0.uniform = pick0(bg);
    if (f1) f1->uniform = bg.sigma;
    return;
  }
  f0.values.assign(l.size, pick0(bg));
  f0.uniform = pick0(bg);
  if (f1) {
    f1->values.assign(l.size, bg.sigma);
    f1->uniform = bg.sigma;
  }
  Range r = magnetic ? h_update_range(l, c) : e_site_range(l, c);
  if (uniform_bg) r = clip_to_box(l, r, m.obstacle->shape.bounds());
  const double near = 0.5 * std::sqrt(3.0) * l.h;
  for (int k = r.k0; k < r.k1; ++k)
    for (int j = r.j0; j < r.j1; ++j)
      for (int i = r.i0; i < r.i1; ++i) {
        const Vec3 x = l.site(magnetic, c, i, j, k);
        const MaterialSample s = (g.material_subsamples > 1 && m.near_interface(x, near))
                                     ? averaged(m, x, l.h, g.material_subsamples)
                                     : m.at(x);
        const std::size_t idx = l.index(i, j, k);
        f0.values[idx] = pick0(s);
        if (f1) f1->values[idx] = s.sigma;
      }
}

void build_mur(FieldState& s, const MediumModel& m) {
  const Lattice& l = s.lat;
  auto add = [&](int c, int i, int j, int k, int ii, int jj, int kk) {
    const MaterialSample bg = m.background_at(l.site(false, c, i, j, k));
    const double cs = 1.0 / std::sqrt(bg.eps * bg.mu);
    s.mur.boundary[c].push_back(l.index(i, j, k));
    s.mur.inner[c].push_back(l.index(ii, jj, kk));
    s.mur.coef[c].push_back((cs * s.dt - l.h) / (cs * s.dt + l.h));
  };
  for (int side = 0; side < 2; ++side) {
    const int ib = side ? l.nx : 0, in = side ? l.nx - 1 : 1;
    for (int k = 1; k < l.nz; ++k)
      for (int j = 0; j < l.ny; ++j) add(1, ib, j, k, in, j, k);
    for (int k = 0; k < l.nz; ++k)
      for (int j = 1; j < l.ny; ++j) add(2, ib, j, k, in, j, k);
    const int jb = side ? l.ny : 0, jn = side ? l.ny - 1 : 1;
    for (int k = 1; k < l.nz; ++k)
      for (int i = 0; i < l.nx; ++i) add(0, i, jb, k, i, jn, k);
    for (int k = 0; k < l.nz; ++k)
      for (int i = 1; i < l.nx; ++i) add(2, i, jb, k, i, jn, k);
    const int kb = side ? l.nz : 0, kn = side ? l.nz - 1 : 1;
    for (int j = 1; j < l.ny; ++j)
      for (int i = 0; i < l.nx; ++i) add(0, i, j, kb, i, j, kn);
    for (int j = 0; j < l.ny; ++j)
      for (int i = 1; i < l.nx; ++i) add(1, i, j, kb, i, j, kn);
  }
  for (int c = 0; c < 3; ++c) {
    s.mur.old_b[c].resize(s.mur.boundary[c].size());
    s.mur.old_n[c].resize(s.mur.inner[c].size());
  }
}

}  // namespace

FieldState make_field_state(const Lattice& lat, const MediumModel& model, const GridSpec& grid) {
  if (!(grid.dt > 0.0)) fail(ErrorKind::config, "field state needs a resolved time step");
  FieldState s;
  s.lat = lat;
  s.dt = grid.dt;
  s.boundary = grid.boundary;
  for (int c = 0; c < 3; ++c) {
    s.E[c].assign(lat.size, 0.0);
    s.H[c].assign(lat.size, 0.0);
    sample_component(lat, model, grid, false, c, s.eps[c], &s.sigma[c]);
    sample_component(lat, model, grid, true, c, s.mu[c], nullptr);

    auto e_coeffs = [&](double eps, double sig, double& ca, double& cb) {
      if (!(eps > 0.0) || !(sig >= 0.0)) fail(ErrorKind::invalid_material, "bad sampled eps/sigma");
      const double r = sig * s.dt / (2.0 * eps);
      ca = (1.0 - r) / (1.0 + r);
      cb = s.dt / (eps * lat.h * (1.0 + r));
    };
    e_coeffs(s.eps[c].uniform, s.sigma[c].uniform, s.ca[c].uniform, s.cb[c].uniform);
    if (!s.eps[c].is_uniform()) {
      s.ca[c].values.resize(lat.size);
      s.cb[c].values.resize(lat.size);
      for (std::size_t i = 0; i < lat.size; ++i)
        e_coeffs(s.eps[c].values[i], s.sigma[c].values[i], s.ca[c].values[i], s.cb[c].values[i]);
    }
    s.hb[c].uniform = -s.dt / (s.mu[c].uniform * lat.h);
    if (!s.mu[c].is_uniform()) {
      s.hb[c].values.resize(lat.size);
      for (std::size_t i = 0; i < lat.size; ++i) s.hb[c].values[i] = -s.dt / (s.mu[c].values[i] * lat.h);
    }
  }
  if (grid.boundary == BoundaryKind::mur) build_mur(s, model);
  return s;
}

SourceStamp make_source_stamp(const FieldState& state, const SourceSpec& src, int subsamples) {
  const Lattice& l = state.lat;
  const int n = std::max(subsamples, 1);
  SourceStamp stamp;
  const Aabb box{src.p - Vec3{src.eta, src.eta, src.eta}, src.p + Vec3{src.eta, src.eta, src.eta}};
  const double vol = src.ball_volume();
  const double h3 = l.h * l.h * l.h;
  for (int c = 0; c < 3; ++c) {
    if (src.a[c] == 0.0) continue;
    const Range r = clip_to_box(l, e_update_range(l, c), box);
    std::vector<SourceStamp::Entry> comp;
    double total = 0.0;
    for (int k = r.k0; k < r.k1; ++k)
      for (int j = r.j0; j < r.j1; ++j)
        for (int i = r.i0; i < r.i1; ++i) {
          const Vec3 x = l.site(false, c, i, j, k);
          const double dc = distance(x, src.p);
          if (dc >= src.eta + 0.5 * std::sqrt(3.0) * l.h) continue;
          int inside = 0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int d = 0; d < n; ++d) {
                const Vec3 y = x + Vec3{((a + 0.5) / n - 0.5) * l.h, ((b + 0.5) / n - 0.5) * l.h,
                                        ((d + 0.5) / n - 0.5) * l.h};
                if (norm2(y - src.p) < src.eta * src.eta) ++inside;
              }
          if (inside == 0) continue;
          const double w = static_cast<double>(inside) / (n * n * n);
          comp.push_back({c, l.index(i, j, k), w, 0.0});
          total += w * h3;
        }
    if (comp.empty() || total <= 0.0)
      fail(ErrorKind::config, "source ball is not resolved by the grid (no E sites inside B)");
    const double scale = vol / total;
    for (auto& e : comp) {
      e.weight *= scale;
      e.coef = state.cb[c].at(e.idx) * l.h * e.weight * src.a[c];
      stamp.entries.push_back(e);
    }
  }
  return stamp;
}

void update_H(FieldState& s, const kernels::Table& k, int threads) {
  for (int c = 0; c < 3; ++c)
    sweep(s.lat, h_update_range(s.lat, c), h_stencil(s.lat, c), s.H[c].data(), s.E, nullptr,
          s.hb[c], k, threads);
}

void update_E(FieldState& s, const kernels::Table& k, int threads) {
  const bool mur = s.boundary == BoundaryKind::mur;
  if (mur) {
    for (int c = 0; c < 3; ++c) {
      const auto& b = s.mur.boundary[c];
      const auto& in = s.mur.inner[c];
      for (std::size_t m = 0; m < b.size(); ++m) {
        s.mur.old_b[c][m] = s.E[c][b[m]];
        s.mur.old_n[c][m] = s.E[c][in[m]];
      }
    }
  }
  for (int c = 0; c < 3; ++c)
    sweep(s.lat, e_update_range(s.lat, c), e_stencil(s.lat, c), s.E[c].data(), s.H, &s.ca[c],
          s.cb[c], k, threads);
  if (mur) {
    for (int c = 0; c < 3; ++c) {
      const auto& b = s.mur.boundary[c];
      const auto& in = s.mur.inner[c];
      for (std::size_t m = 0; m < b.size(); ++m)
        s.E[c][b[m]] = s.mur.old_n[c][m] + s.mur.coef[c][m] * (s.E[c][in[m]] - s.mur.old_b[c][m]);
    }
  }
}

void inject_current(FieldState& s, const SourceStamp& stamp, double f_value) {
  if (f_value == 0.0) return;
  for (const auto& e : stamp.entries) s.E[e.comp][e.idx] += e.coef * f_value;
}

bool fields_finite(const FieldState& s, const kernels::Table& k) {
  for (int c = 0; c < 3; ++c) {
    if (!k.all_finite(s.E[c].data(), s.E[c].size())) return false;
    if (!k.all_finite(s.H[c].data(), s.H[c].size())) return false;
  }
  return true;
}

void step(FieldState& s, double source_value, const SourceStamp& stamp, const kernels::Table& k,
          int threads) {
  update_H(s, k, threads);
  update_E(s, k, threads);
  inject_current(s, stamp, source_value);
  ++s.step;
  s.t = s.step * s.dt;
  if (!fields_finite(s, k)) {
    std::ostringstream os;
    os << "non-finite field value after step " << s.step;
    fail(ErrorKind::instability, os.str());
  }
}

double discrete_energy(const FieldState& s, const kernels::Table& kt) {
  const Lattice& l = s.lat;
  const double h3 = l.h * l.h * l.h;
  double e_part = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k <= l.nz; ++k) {
      const std::size_t base = l.index(0, 0, k);
      const double* e = s.E[c].data() + base;
      e_part += s.eps[c].data() ? kt.weighted_dot(s.eps[c].data() + base, e, e, l.sy)
                                : s.eps[c].uniform * kt.dot(e, e, l.sy);
    }
  }
  double h_part = 0.0;
  std::vector<double> tmp;
  for (int c = 0; c < 3; ++c) {
    const Range r = h_update_range(l, c);
    const Stencil st = h_stencil(l, c);
    const std::size_t n = static_cast<std::size_t>(r.i1 - r.i0);
    tmp.resize(n);
    for (int k = r.k0; k < r.k1; ++k) {
      for (int j = r.j0; j < r.j1; ++j) {
        const std::size_t base = l.index(r.i0, j, k);
        const double* hrow = s.H[c].data() + base;
        std::copy(hrow, hrow + n, tmp.begin());
        kernels::CurlRow row;
        row.out = tmp.data();
        row.a1 = s.E[st.a].data() + base + st.a1;
        row.a0 = s.E[st.a].data() + base + st.a0;
        row.b1 = s.E[st.b].data() + base + st.b1;
        row.b0 = s.E[st.b].data() + base + st.b0;
        row.cb = s.hb[c].data() ? s.hb[c].data() + base : nullptr;
        row.cb_u = s.hb[c].uniform;
        row.n = n;
        kt.curl_row(row);
        h_part += s.mu[c].data() ? kt.weighted_dot(s.mu[c].data() + base, hrow, tmp.data(), n)
                                 : s.mu[c].uniform * kt.dot(hrow, tmp.data(), n);
      }
    }
  }
  return 0.5 * (e_part + h_part) * h3;
}

double discrete_energy_collocated(const FieldState& s) {
  const double h3 = s.lat.h * s.lat.h * s.lat.h;
  double sum = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < s.lat.size; ++i)
      sum += s.eps[c].at(i) * s.E[c][i] * s.E[c][i] + s.mu[c].at(i) * s.H[c][i] * s.H[c][i];
  return 0.5 * sum * h3;
}

}  // namespace emenc
