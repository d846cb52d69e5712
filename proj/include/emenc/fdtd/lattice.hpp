#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "emenc/medium.hpp"
#include "emenc/shape.hpp"
#include "emenc/vec3.hpp"

namespace emenc {

enum class BoundaryKind { pec, mur };

/// Uniform Yee grid over `bounds`, time step dt and step count.
struct GridSpec {
  double h = 0.02;
  Aabb bounds{{-1, -1, -1}, {1, 1, 1}};
  double dt = 0.0;     ///< 0: largest step with n_steps * dt = T under the CFL bound
  int n_steps = 0;     ///< 0: ceil(T / dt)
  double cfl = 0.5;
  BoundaryKind boundary = BoundaryKind::pec;
  int threads = 1;
  int material_subsamples = 8;  ///< per axis at interface sites; 1 = pointwise sampling
  int source_subsamples = 8;
  bool check_energy = false;    ///< assert energy non-increase on source-free steps
};

/// Cell counts and strides. Every component array has (nx+1)(ny+1)(nz+1) entries, x fastest.
/// Component sites (integer index i, j, k):
///   Ex (i+1/2, j, k)  Ey (i, j+1/2, k)  Ez (i, j, k+1/2)
///   Hx (i, j+1/2, k+1/2)  Hy (i+1/2, j, k+1/2)  Hz (i+1/2, j+1/2, k)
struct Lattice {
  int nx = 0, ny = 0, nz = 0;
  std::size_t sx = 0, sy = 0, size = 0;
  Vec3 origin;
  double h = 0.0;

  static Lattice make(const Aabb& bounds, double h);
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + sx * static_cast<std::size_t>(j) +
           sy * static_cast<std::size_t>(k);
  }
  /// Physical position of component c (0..2) of E (magnetic = false) or H.
  Vec3 site(bool magnetic, int c, int i, int j, int k) const;
  std::size_t cells() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
};

struct MaterialSample {
  double eps = 1.0;
  double mu = 1.0;
  double sigma = 0.0;
};

/// Coefficient model sampled by the solver: background plus optional obstacle. A custom
/// background field may replace the constant background.
struct MediumModel {
  BackgroundMedium bg;
  std::optional<ObstacleSpec> obstacle;
  std::function<MaterialSample(const Vec3&)> background_field;

  MaterialSample background_at(const Vec3& x) const;
  MaterialSample at(const Vec3& x) const;
  /// True if the obstacle boundary passes within `radius` of x.
  bool near_interface(const Vec3& x, double radius) const;
};

/// Time step and count from the CFL bound and the record duration T.
void resolve_time_step(GridSpec& grid, double c_max, double T);

}  // namespace emenc
