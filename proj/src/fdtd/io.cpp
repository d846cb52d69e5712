#include "emenc/fdtd/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "emenc/error.hpp"

namespace emenc {

namespace {

constexpr char kSnapMagic[8] = {'E', 'M', 'S', 'N', 'A', 'P', '1', '\0'};
constexpr char kTraceMagic[8] = {'E', 'M', 'T', 'R', 'A', 'C', 'E', '1'};

template <class T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_array(std::ostream& os, const double* p, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < n; ++i) put(os, p[i]);
  }
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::io, "truncated file");
  return to_le(v);
}

void get_array(std::istream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) fail(ErrorKind::io, "truncated file");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < n; ++i) p[i] = to_le(p[i]);
}

void check_magic(std::istream& is, const char (&magic)[8], const char* what) {
  char m[8];
  is.read(m, 8);
  if (!is || std::memcmp(m, magic, 8) != 0) fail(ErrorKind::io, std::string("not an ") + what + " file");
}

}  // namespace

void write_snapshot(std::ostream& os, const FieldState& s) {
  os.write(kSnapMagic, 8);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.lat.nx));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.lat.ny));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.lat.nz));
  put(os, s.lat.h);
  put(os, s.t);
  for (int c = 0; c < 3; ++c) put_array(os, s.E[c].data(), s.E[c].size());
  for (int c = 0; c < 3; ++c) put_array(os, s.H[c].data(), s.H[c].size());
}

void write_snapshot(const std::string& path, const FieldState& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot write " + path);
  write_snapshot(os, s);
  if (!os) fail(ErrorKind::io, "write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot read " + path);
  check_magic(is, kSnapMagic, "EMSNAP1");
  Snapshot s;
  s.nx = static_cast<int>(get<std::uint64_t>(is));
  s.ny = static_cast<int>(get<std::uint64_t>(is));
  s.nz = static_cast<int>(get<std::uint64_t>(is));
  s.h = get<double>(is);
  s.t = get<double>(is);
  const std::size_t n = static_cast<std::size_t>(s.nx + 1) * (s.ny + 1) * (s.nz + 1);
  for (auto& f : s.fields) {
    f.resize(n);
    get_array(is, f.data(), n);
  }
  return s;
}

void write_trace(std::ostream& os, const TraceRecord& tr) {
  os.write(kTraceMagic, 8);
  put<std::uint64_t>(os, tr.points.size());
  put<std::uint64_t>(os, tr.samples);
  put(os, tr.dt);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(tr.mode));
  put_array(os, tr.data.data(), tr.data.size());
  for (const Vec3& p : tr.points) {
    put(os, p.x);
    put(os, p.y);
    put(os, p.z);
  }
  put_array(os, tr.weights.data(), tr.weights.size());
  put<std::uint64_t>(os, tr.fingerprint.size());
  os.write(tr.fingerprint.data(), static_cast<std::streamsize>(tr.fingerprint.size()));
}

void write_trace(const std::string& path, const TraceRecord& tr) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot write " + path);
  write_trace(os, tr);
  if (!os) fail(ErrorKind::io, "write failed: " + path);
}

TraceRecord read_trace(std::istream& is) {
  check_magic(is, kTraceMagic, "EMTRACE1");
  TraceRecord tr;
  const auto n_points = get<std::uint64_t>(is);
  tr.samples = get<std::uint64_t>(is);
  tr.dt = get<double>(is);
  const auto mode = get<std::uint64_t>(is);
  if (mode > 2) fail(ErrorKind::io, "bad trace mode");
  tr.mode = static_cast<TraceMode>(mode);
  if (n_points > (1u << 28) || tr.samples > (1u << 28)) fail(ErrorKind::io, "implausible trace header");
  tr.data.resize(n_points * tr.samples * 3);
  get_array(is, tr.data.data(), tr.data.size());
  tr.points.resize(n_points);
  for (Vec3& p : tr.points) {
    p.x = get<double>(is);
    p.y = get<double>(is);
    p.z = get<double>(is);
  }
  tr.weights.resize(n_points);
  get_array(is, tr.weights.data(), n_points);
  const auto len = get<std::uint64_t>(is);
  if (len > 4096) fail(ErrorKind::io, "implausible fingerprint length");
  tr.fingerprint.resize(len);
  is.read(tr.fingerprint.data(), static_cast<std::streamsize>(len));
  if (!is) fail(ErrorKind::io, "truncated file");
  return tr;
}

TraceRecord read_trace(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot read " + path);
  return read_trace(is);
}

}  // namespace emenc
