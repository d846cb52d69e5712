#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "emenc/fdtd/solver.hpp"
#include "emenc/vec3.hpp"

namespace emenc {

enum class TraceMode { total_with_obstacle, background, scattered };
const char* to_string(TraceMode m);
TraceMode trace_mode_from_string(const std::string& s);

/// Electric field time series at quadrature points inside B.
/// data is row-major (sample, point, component); sample n is time n * dt, n = 0..samples-1.
struct TraceRecord {
  std::vector<Vec3> points;
  std::vector<double> weights;
  double dt = 0.0;
  std::size_t samples = 0;
  TraceMode mode = TraceMode::background;
  std::string fingerprint;
  std::vector<double> data;

  Vec3 at(std::size_t sample, std::size_t point) const {
    const double* v = data.data() + (sample * points.size() + point) * 3;
    return {v[0], v[1], v[2]};
  }
  double duration() const { return dt * static_cast<double>(samples - 1); }
  /// Component series of one point, contiguous in time.
  std::vector<double> series(std::size_t point, int comp) const;
};

/// Cell centres strictly inside B(p, eta) with partial-volume weights (rescaled to the exact
/// ball volume); E is averaged from the four surrounding edges of each component.
class TraceSampler {
 public:
  TraceSampler(const Lattice& lat, const Vec3& p, double eta, int subsamples = 8);

  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  void record(const FieldState& s, std::vector<double>& out) const;

 private:
  std::vector<Vec3> points_;
  std::vector<double> weights_;
  std::vector<std::array<std::array<std::size_t, 4>, 3>> gather_;
};

/// E at arbitrary interior points by trilinear interpolation of each staggered component.
class ProbeSampler {
 public:
  ProbeSampler(const Lattice& lat, std::vector<Vec3> points);

  const std::vector<Vec3>& points() const { return points_; }
  void record(const FieldState& s, std::vector<double>& out) const;

 private:
  struct Stencil {
    std::array<std::size_t, 8> idx;
    std::array<double, 8> w;
  };
  std::vector<Vec3> points_;
  std::vector<std::array<Stencil, 3>> stencils_;
};

}  // namespace emenc
