#include "emenc/fdtd/lattice.hpp"

#include <cmath>
#include <sstream>

#include "emenc/error.hpp"

namespace emenc {

Lattice Lattice::make(const Aabb& bounds, double h) {
  if (!(h > 0.0)) fail(ErrorKind::config, "grid step h must be positive");
  Lattice l;
  l.h = h;
  l.origin = bounds.lo;
  const Vec3 ext = bounds.hi - bounds.lo;
  l.nx = static_cast<int>(std::lround(ext.x / h));
  l.ny = static_cast<int>(std::lround(ext.y / h));
  l.nz = static_cast<int>(std::lround(ext.z / h));
  if (l.nx < 2 || l.ny < 2 || l.nz < 2) fail(ErrorKind::config, "grid needs at least 2 cells per axis");
  l.sx = static_cast<std::size_t>(l.nx + 1);
  l.sy = l.sx * static_cast<std::size_t>(l.ny + 1);
  l.size = l.sy * static_cast<std::size_t>(l.nz + 1);
  return l;
}

Vec3 Lattice::site(bool magnetic, int c, int i, int j, int k) const {
  Vec3 off{0, 0, 0};
  if (!magnetic) {
    off[c] = 0.5;
  } else {
    off = {0.5, 0.5, 0.5};
    off[c] = 0.0;
  }
  return origin + Vec3{(i + off.x) * h, (j + off.y) * h, (k + off.z) * h};
}

MaterialSample MediumModel::background_at(const Vec3& x) const {
  if (background_field) return background_field(x);
  return {bg.eps0, bg.mu0, bg.sigma0};
}

MaterialSample MediumModel::at(const Vec3& x) const {
  MaterialSample m = background_at(x);
  if (obstacle && obstacle->shape.contains(x)) {
    m.eps *= obstacle->eps_r(x);
    m.mu *= obstacle->mu_r(x);
    m.sigma += obstacle->h_pert(x);
  }
  return m;
}

bool MediumModel::near_interface(const Vec3& x, double radius) const {
  if (!obstacle) return false;
  return std::abs(obstacle->shape.signed_distance(x)) < radius;
}

void resolve_time_step(GridSpec& grid, double c_max, double T) {
  if (!(grid.cfl > 0.0 && grid.cfl <= 1.0)) fail(ErrorKind::config, "CFL number must lie in (0, 1]");
  const double dt_max = grid.cfl * grid.h / (std::sqrt(3.0) * c_max);
  if (grid.dt <= 0.0) {
    const double n = std::ceil(T / dt_max - 1e-9);
    grid.dt = T / n;
  }
  if (grid.dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << grid.dt << " violates the CFL bound " << dt_max;
    fail(ErrorKind::config, os.str());
  }
  if (grid.n_steps <= 0) grid.n_steps = static_cast<int>(std::lround(std::ceil(T / grid.dt - 1e-9)));
}

}  // namespace emenc
