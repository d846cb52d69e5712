#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "emenc/fdtd/kernels.hpp"
#include "emenc/fdtd/lattice.hpp"
#include "emenc/source.hpp"

namespace emenc {

/// A per-site coefficient: either one uniform value or a full lattice array.
struct CoeffField {
  double uniform = 0.0;
  std::vector<double> values;

  bool is_uniform() const { return values.empty(); }
  const double* data() const { return values.empty() ? nullptr : values.data(); }
  double at(std::size_t i) const { return values.empty() ? uniform : values[i]; }
};

/// First-order Mur boundary: boundary site b takes E_b^{n+1} = E_n^n + c (E_n^{n+1} - E_b^n)
/// from its inward neighbour n.
struct MurBoundary {
  std::array<std::vector<std::size_t>, 3> boundary;
  std::array<std::vector<std::size_t>, 3> inner;
  std::array<std::vector<double>, 3> coef;
  std::array<std::vector<double>, 3> old_b;
  std::array<std::vector<double>, 3> old_n;
};

/// Staggered fields and coefficients. After k steps E holds E^k and H holds H^{k-1/2}.
struct FieldState {
  Lattice lat;
  std::array<std::vector<double>, 3> E;
  std::array<std::vector<double>, 3> H;
  std::array<CoeffField, 3> eps;    ///< at E sites
  std::array<CoeffField, 3> sigma;  ///< at E sites
  std::array<CoeffField, 3> mu;     ///< at H sites
  std::array<CoeffField, 3> ca;     ///< (1 - s) / (1 + s), s = sigma dt / (2 eps)
  std::array<CoeffField, 3> cb;     ///< dt / (eps h (1 + s))
  std::array<CoeffField, 3> hb;     ///< -dt / (mu h)
  double dt = 0.0;
  double t = 0.0;
  int step = 0;
  BoundaryKind boundary = BoundaryKind::pec;
  MurBoundary mur;
};

/// Builds zero fields and samples the medium at every component site, volume-averaging over
/// subsamples^3 points at sites within one cell diagonal of the obstacle boundary.
FieldState make_field_state(const Lattice& lat, const MediumModel& model, const GridSpec& grid);

/// Current density J = f(t) w(x) a on E sites; coef = cb * h * w * a_c so that
/// E += coef * f(t_{n+1/2}) completes the semi-implicit update.
struct SourceStamp {
  struct Entry {
    int comp;
    std::size_t idx;
    double weight;  ///< overlap fraction of the site cell with B (rescaled)
    double coef;
  };
  std::vector<Entry> entries;
};

/// Overlap fractions from subsamples^3 points per site cell, rescaled per component so that
/// sum(weight) h^3 equals the ball volume.
SourceStamp make_source_stamp(const FieldState& state, const SourceSpec& src, int subsamples);

/// H half-step followed by the conductive E update (with Mur if enabled). No source.
void update_H(FieldState& s, const kernels::Table& k, int threads);
void update_E(FieldState& s, const kernels::Table& k, int threads);
void inject_current(FieldState& s, const SourceStamp& stamp, double f_value);

/// One leapfrog step with source value f(t_n + dt/2). Throws instability with the step index
/// if any field value is not finite afterwards.
void step(FieldState& s, double source_value, const SourceStamp& stamp, const kernels::Table& k,
          int threads = 1);

bool fields_finite(const FieldState& s, const kernels::Table& k);

/// Discrete energy of the state (E^n, H^{n-1/2}):
///   1/2 sum eps |E^n|^2 h^3 + 1/2 sum mu H^{n-1/2} . H^{n+1/2} h^3,
/// with H^{n+1/2} obtained from a source-free half step. This is the quadratic form the Yee
/// scheme conserves exactly without loss and PEC walls; the reduction order is fixed.
double discrete_energy(const FieldState& s, const kernels::Table& k = kernels::best());

/// Plain collocated form 1/2 sum (eps |E|^2 + mu |H|^2) h^3 over all sites.
double discrete_energy_collocated(const FieldState& s);

}  // namespace emenc
