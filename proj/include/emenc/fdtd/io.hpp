#pragma once

#include <iosfwd>
#include <string>

#include "emenc/fdtd/solver.hpp"
#include "emenc/fdtd/trace.hpp"

namespace emenc {

/// EMSNAP1: magic (8 bytes, NUL padded), nx ny nz (u64), h, t (f64), then Ex Ey Ez Hx Hy Hz,
/// each (nx+1)(ny+1)(nz+1) f64 in x-fastest order. Little-endian.
void write_snapshot(std::ostream& os, const FieldState& s);
void write_snapshot(const std::string& path, const FieldState& s);

struct Snapshot {
  int nx = 0, ny = 0, nz = 0;
  double h = 0.0;
  double t = 0.0;
  std::array<std::vector<double>, 6> fields;  ///< Ex Ey Ez Hx Hy Hz
};
Snapshot read_snapshot(const std::string& path);

/// EMTRACE1: magic (8 bytes), n_points (u64), n_samples (u64), dt (f64), mode (u64), then
/// row-major (sample, point, component) f64. Trailer: point coordinates (3 f64 each), weights
/// (f64 each), fingerprint length (u64) and bytes.
void write_trace(std::ostream& os, const TraceRecord& tr);
void write_trace(const std::string& path, const TraceRecord& tr);
TraceRecord read_trace(std::istream& is);
TraceRecord read_trace(const std::string& path);

}  // namespace emenc
