#include "emenc/fdtd/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <variant>

#include "emenc/error.hpp"
#include "emenc/fingerprint.hpp"

namespace emenc {

double max_wave_speed(const MediumModel& model) {
  double c = 0.0;
  auto visit = [&](const MaterialSample& s) { c = std::max(c, 1.0 / std::sqrt(s.eps * s.mu)); };
  visit(model.background_at({0, 0, 0}));
  if (model.obstacle) {
    const auto& ob = *model.obstacle;
    if (ob.piecewise_constant()) {
      const MaterialSample bg = model.background_at(ob.shape.bounds().lo);
      visit({bg.eps * ob.eps_r({}), bg.mu * ob.mu_r({}), 0.0});
    } else {
      for (const Vec3& x : interior_samples(ob.shape, kMaterialSamples)) visit(model.at(x));
    }
  }
  if (model.background_field) {
    // Coarse probe of a user field; the solver still checks stability via non-finite values.
    for (unsigned i = 1; i <= 4096; ++i) {
      const Vec3 u = halton3(i);
      visit(model.background_field(u * 2.0 - Vec3{1, 1, 1}));
    }
  }
  return c;
}

namespace {

double wall_distance(const Lattice& l, const Vec3& x) {
  const Vec3 hi = l.origin + Vec3{l.nx * l.h, l.ny * l.h, l.nz * l.h};
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) d = std::min({d, x[a] - l.origin[a], hi[a] - x[a]});
  return d;
}

}  // namespace

void check_domain(const Lattice& l, const GridSpec& grid, const MediumModel& model,
                  const SourceSpec& src, double c_max) {
  const double margin = 2.0 * l.h;
  const double dB = wall_distance(l, src.p) - src.eta;
  if (dB < margin) fail(ErrorKind::config, "source ball B is not inside the grid with a two-cell margin");
  if (model.obstacle) {
    const Aabb b = model.obstacle->shape.bounds();
    for (const Vec3& corner : {b.lo, b.hi})
      if (wall_distance(l, corner) < margin)
        fail(ErrorKind::config, "obstacle D is not inside the grid with a two-cell margin");
  }
  if (grid.boundary == BoundaryKind::pec) {
    const double T = grid.dt * grid.n_steps;
    if (2.0 * dB < c_max * T + l.h) {
      std::ostringstream os;
      os << "grid too small for the causality margin: wall reflections reach B after "
         << 2.0 * dB / c_max << " < T = " << T << " (enlarge bounds or use the Mur boundary)";
      fail(ErrorKind::config, os.str());
    }
  }
}

namespace {

void describe_shape(Canon& c, const Shape& s, const std::string& prefix) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          c.add(prefix + "sphere", v.radius);
          for (int a = 0; a < 3; ++a) c.add(prefix + "c", v.center[a]);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          for (int a = 0; a < 3; ++a) c.add(prefix + "ellipsoid", v.semi_axes[a]);
          for (int a = 0; a < 3; ++a) c.add(prefix + "c", v.center[a]);
        } else if constexpr (std::is_same_v<T, Box>) {
          for (int a = 0; a < 3; ++a) c.add(prefix + "box_lo", v.lo[a]);
          for (int a = 0; a < 3; ++a) c.add(prefix + "box_hi", v.hi[a]);
        } else {
          c.add(prefix + "union", static_cast<long long>(v.parts.size()));
          for (std::size_t i = 0; i < v.parts.size(); ++i)
            describe_shape(c, v.parts[i], prefix + std::to_string(i) + ".");
        }
      },
      s.variant());
}

void describe_field(Canon& c, const std::string& key, const MaterialField& f) {
  if (f.is_constant())
    c.add(key, f.constant());
  else
    c.add(key, std::string_view("callable"));
}

}  // namespace

std::string run_fingerprint(const MediumModel& model, const SourceSpec& src, const GridSpec& grid) {
  Canon c;
  c.add("eps0", model.bg.eps0).add("mu0", model.bg.mu0).add("sigma0", model.bg.sigma0);
  if (model.background_field) c.add("background", std::string_view("callable"));
  if (model.obstacle) {
    describe_shape(c, model.obstacle->shape, "D.");
    describe_field(c, "e", model.obstacle->e_pert);
    describe_field(c, "m", model.obstacle->m_pert);
    describe_field(c, "hp", model.obstacle->h_pert);
  }
  for (int a = 0; a < 3; ++a) c.add("p", src.p[a]);
  for (int a = 0; a < 3; ++a) c.add("a", src.a[a]);
  c.add("eta", src.eta).add("T", src.T);
  const auto& pu = src.pulse;
  c.add("pulse", static_cast<int>(pu.family)).add("k", pu.k).add("t_rise", pu.t_rise);
  c.add("omega", pu.omega).add("t_ramp", pu.t_ramp).add("amp", pu.amplitude).add("offset", pu.offset);
  c.add("h", grid.h).add("dt", grid.dt).add("n", grid.n_steps).add("cfl", grid.cfl);
  for (int a = 0; a < 3; ++a) c.add("lo", grid.bounds.lo[a]);
  for (int a = 0; a < 3; ++a) c.add("hi", grid.bounds.hi[a]);
  c.add("boundary", static_cast<int>(grid.boundary));
  c.add("msub", grid.material_subsamples).add("ssub", grid.source_subsamples);
  return c.hash();
}

Lattice prepare_grid(const MediumModel& model, const SourceSpec& src, GridSpec& grid) {
  model.bg.validate();
  src.validate();
  if (model.obstacle) {
    model.obstacle->validate(model.bg);
    dist_D_B(model.obstacle->shape, src.p, src.eta);
  }
  const double c_max = max_wave_speed(model);
  resolve_time_step(grid, c_max, src.T);
  const Lattice lat = Lattice::make(grid.bounds, grid.h);
  check_domain(lat, grid, model, src, c_max);
  return lat;
}

ProbedRun run_simulation_probed(const BackgroundMedium& bg, const std::optional<ObstacleSpec>& obstacle,
                                const SourceSpec& src, GridSpec grid, const std::vector<Vec3>& probes,
                                const kernels::Table& kt) {
  MediumModel model{bg, obstacle, {}};
  const Lattice lat = prepare_grid(model, src, grid);
  FieldState state = make_field_state(lat, model, grid);
  const SourceStamp stamp = make_source_stamp(state, src, grid.source_subsamples);
  const TraceSampler sampler(lat, src.p, src.eta);
  const ProbeSampler probe_sampler(lat, probes);

  ProbedRun out;
  TraceRecord& tr = out.trace;
  tr.points = sampler.points();
  tr.weights = sampler.weights();
  tr.dt = grid.dt;
  tr.samples = static_cast<std::size_t>(grid.n_steps) + 1;
  tr.mode = obstacle ? TraceMode::total_with_obstacle : TraceMode::background;
  tr.fingerprint = run_fingerprint(model, src, grid);
  tr.data.reserve(tr.samples * tr.points.size() * 3);
  sampler.record(state, tr.data);

  TraceRecord& pr = out.probes;
  pr.points = probes;
  pr.weights.assign(probes.size(), 1.0);
  pr.dt = tr.dt;
  pr.samples = tr.samples;
  pr.mode = tr.mode;
  pr.fingerprint = tr.fingerprint;
  pr.data.reserve(pr.samples * probes.size() * 3);
  probe_sampler.record(state, pr.data);

  double energy = grid.check_energy ? discrete_energy(state, kt) : 0.0;
  for (int n = 0; n < grid.n_steps; ++n) {
    const double f = src.pulse.value((n + 0.5) * grid.dt);
    step(state, f, stamp, kt, grid.threads);
    sampler.record(state, tr.data);
    probe_sampler.record(state, pr.data);
    if (grid.check_energy) {
      const double e = discrete_energy(state, kt);
      if (f == 0.0 && e > energy * (1.0 + 1e-10) + 1e-300) {
        std::ostringstream os;
        os << "discrete energy grew on a source-free step " << state.step << " (" << energy
           << " -> " << e << ")";
        fail(ErrorKind::instability, os.str());
      }
      energy = e;
    }
  }
  return out;
}

TraceRecord run_simulation(const BackgroundMedium& bg, const std::optional<ObstacleSpec>& obstacle,
                           const SourceSpec& src, GridSpec grid, const kernels::Table& kt) {
  return run_simulation_probed(bg, obstacle, src, grid, {}, kt).trace;
}

ContrastSites find_contrast(const FieldState& total, const FieldState& background) {
  ContrastSites cs;
  const double dt = total.dt;
  const double h = total.lat.h;
  for (int c = 0; c < 3; ++c) {
    if (!total.eps[c].is_uniform() || !total.sigma[c].is_uniform() ||
        total.eps[c].uniform != background.eps[c].uniform ||
        total.sigma[c].uniform != background.sigma[c].uniform) {
      for (std::size_t i = 0; i < total.lat.size; ++i) {
        const double de = total.eps[c].at(i) - background.eps[c].at(i);
        const double ds = total.sigma[c].at(i) - background.sigma[c].at(i);
        if (de == 0.0 && ds == 0.0) continue;
        const double cbh = total.cb[c].at(i) * h;
        cs.e_idx[c].push_back(i);
        cs.alpha[c].push_back(cbh * de / dt);
        cs.beta[c].push_back(cbh * ds * 0.5);
      }
    }
    if (!total.mu[c].is_uniform() || total.mu[c].uniform != background.mu[c].uniform) {
      for (std::size_t i = 0; i < total.lat.size; ++i) {
        const double mu = total.mu[c].at(i);
        const double dm = mu - background.mu[c].at(i);
        if (dm == 0.0) continue;
        cs.h_idx[c].push_back(i);
        cs.gamma[c].push_back(dm / mu);
      }
    }
  }
  return cs;
}

// ---- lockstep background ----

LockstepBackground::LockstepBackground(const BackgroundMedium& bg, const SourceSpec& src,
                                       const GridSpec& grid, const Lattice& lat,
                                       const kernels::Table& kt)
    : src_(src),
      grid_(grid),
      kt_(kt),
      state_(make_field_state(lat, MediumModel{bg, std::nullopt, {}}, grid)),
      stamp_(make_source_stamp(state_, src, grid.source_subsamples)),
      sampler_(lat, src.p, src.eta) {
  trace_.points = sampler_.points();
  trace_.weights = sampler_.weights();
  trace_.dt = grid.dt;
  trace_.samples = static_cast<std::size_t>(grid.n_steps) + 1;
  trace_.mode = TraceMode::background;
  trace_.fingerprint = run_fingerprint(MediumModel{bg, std::nullopt, {}}, src, grid);
  trace_.data.reserve(trace_.samples * trace_.points.size() * 3);
  sampler_.record(state_, trace_.data);
}

void LockstepBackground::attach(const ContrastSites& sites, const std::string&, std::size_t) {
  sites_ = &sites;
}

void LockstepBackground::advance_H(std::vector<double>& h_new) {
  update_H(state_, kt_, grid_.threads);
  h_new.clear();
  for (int c = 0; c < 3; ++c)
    for (std::size_t i : sites_->h_idx[c]) h_new.push_back(state_.H[c][i]);
}

void LockstepBackground::advance_E(std::vector<double>& e_new) {
  update_E(state_, kt_, grid_.threads);
  inject_current(state_, stamp_, src_.pulse.value((state_.step + 0.5) * grid_.dt));
  ++state_.step;
  state_.t = state_.step * grid_.dt;
  if (!fields_finite(state_, kt_)) {
    std::ostringstream os;
    os << "non-finite background field after step " << state_.step;
    fail(ErrorKind::instability, os.str());
  }
  sampler_.record(state_, trace_.data);
  e_new.clear();
  for (int c = 0; c < 3; ++c)
    for (std::size_t i : sites_->e_idx[c]) e_new.push_back(state_.E[c][i]);
}

TraceRecord LockstepBackground::take_trace() { return std::move(trace_); }

// ---- background-volume store ----

namespace {

constexpr char kStoreMagic[8] = {'E', 'M', 'B', 'G', 'V', 'O', 'L', '1'};

std::string layout_fingerprint(const ContrastSites& s, const std::string& run_fp, std::size_t n_steps) {
  Canon c;
  c.add("run", run_fp).add("steps", static_cast<long long>(n_steps));
  std::uint64_t acc = 0;
  for (int k = 0; k < 3; ++k) {
    c.add("ne", static_cast<long long>(s.e_idx[k].size()));
    c.add("nh", static_cast<long long>(s.h_idx[k].size()));
    for (std::size_t i : s.e_idx[k]) acc = acc * 1000003u + i;
    for (std::size_t i : s.h_idx[k]) acc = acc * 1000003u + i;
  }
  c.add("sites", static_cast<long long>(acc));
  return c.hash();
}

}  // namespace

RecordingBackground::RecordingBackground(BackgroundStream& inner, std::string path)
    : inner_(inner), path_(std::move(path)) {}

void RecordingBackground::attach(const ContrastSites& sites, const std::string& fp, std::size_t n_steps) {
  inner_.attach(sites, fp, n_steps);
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) fail(ErrorKind::io, "cannot write background store " + path_);
  out_.write(kStoreMagic, 8);
  const std::string lf = layout_fingerprint(sites, fp, n_steps);
  out_.write(lf.data(), 16);
  const std::uint64_t counts[3] = {sites.e_count(), sites.h_count(), n_steps};
  out_.write(reinterpret_cast<const char*>(counts), sizeof counts);
}

void RecordingBackground::advance_H(std::vector<double>& h_new) {
  inner_.advance_H(h_new);
  out_.write(reinterpret_cast<const char*>(h_new.data()), static_cast<std::streamsize>(h_new.size() * 8));
}

void RecordingBackground::advance_E(std::vector<double>& e_new) {
  inner_.advance_E(e_new);
  out_.write(reinterpret_cast<const char*>(e_new.data()), static_cast<std::streamsize>(e_new.size() * 8));
  if (!out_) fail(ErrorKind::io, "write failed on background store " + path_);
}

StoredBackground::StoredBackground(std::string path) : path_(std::move(path)) {}

void StoredBackground::attach(const ContrastSites& sites, const std::string& fp, std::size_t n_steps) {
  in_.open(path_, std::ios::binary);
  if (!in_) fail(ErrorKind::dependency, "background volume store not found: " + path_);
  char magic[8];
  char lf[16];
  std::uint64_t counts[3];
  in_.read(magic, 8);
  in_.read(lf, 16);
  in_.read(reinterpret_cast<char*>(counts), sizeof counts);
  if (!in_ || std::memcmp(magic, kStoreMagic, 8) != 0)
    fail(ErrorKind::dependency, "not a background volume store: " + path_);
  if (std::string(lf, 16) != layout_fingerprint(sites, fp, n_steps) || counts[0] != sites.e_count() ||
      counts[1] != sites.h_count() || counts[2] != n_steps)
    fail(ErrorKind::dependency, "background volume store does not match this run: " + path_);
}

void StoredBackground::advance_H(std::vector<double>& h_new) {
  in_.read(reinterpret_cast<char*>(h_new.data()), static_cast<std::streamsize>(h_new.size() * 8));
  if (!in_) fail(ErrorKind::dependency, "background volume store truncated: " + path_);
}

void StoredBackground::advance_E(std::vector<double>& e_new) {
  in_.read(reinterpret_cast<char*>(e_new.data()), static_cast<std::streamsize>(e_new.size() * 8));
  if (!in_) fail(ErrorKind::dependency, "background volume store truncated: " + path_);
}

// ---- scattered run ----

TraceRecord run_scattered(const BackgroundMedium& bg, const ObstacleSpec& obstacle,
                          const SourceSpec& src, GridSpec grid, BackgroundStream& background,
                          const kernels::Table& kt) {
  MediumModel model{bg, obstacle, {}};
  const Lattice lat = prepare_grid(model, src, grid);
  FieldState state = make_field_state(lat, model, grid);
  const ContrastSites sites = [&] {
    const FieldState bg_coeffs = make_field_state(lat, MediumModel{bg, std::nullopt, {}}, grid);
    return find_contrast(state, bg_coeffs);
  }();
  const TraceSampler sampler(lat, src.p, src.eta);

  TraceRecord tr;
  tr.points = sampler.points();
  tr.weights = sampler.weights();
  tr.dt = grid.dt;
  tr.samples = static_cast<std::size_t>(grid.n_steps) + 1;
  tr.mode = TraceMode::scattered;
  tr.fingerprint = run_fingerprint(model, src, grid);
  tr.data.reserve(tr.samples * tr.points.size() * 3);
  sampler.record(state, tr.data);

  const std::string bg_fp = run_fingerprint(MediumModel{bg, std::nullopt, {}}, src, grid);
  background.attach(sites, bg_fp, static_cast<std::size_t>(grid.n_steps));

  std::vector<double> h_old(sites.h_count(), 0.0), h_new(sites.h_count());
  std::vector<double> e_old(sites.e_count(), 0.0), e_new(sites.e_count());
  for (int n = 0; n < grid.n_steps; ++n) {
    background.advance_H(h_new);
    update_H(state, kt, grid.threads);
    std::size_t m = 0;
    for (int c = 0; c < 3; ++c) {
      double* H = state.H[c].data();
      const auto& idx = sites.h_idx[c];
      const auto& g = sites.gamma[c];
      for (std::size_t q = 0; q < idx.size(); ++q, ++m) H[idx[q]] -= g[q] * (h_new[m] - h_old[m]);
    }
    h_old.swap(h_new);

    background.advance_E(e_new);
    update_E(state, kt, grid.threads);
    m = 0;
    for (int c = 0; c < 3; ++c) {
      double* E = state.E[c].data();
      const auto& idx = sites.e_idx[c];
      const auto& al = sites.alpha[c];
      const auto& be = sites.beta[c];
      for (std::size_t q = 0; q < idx.size(); ++q, ++m)
        E[idx[q]] -= al[q] * (e_new[m] - e_old[m]) + be[q] * (e_new[m] + e_old[m]);
    }
    e_old.swap(e_new);

    ++state.step;
    state.t = state.step * grid.dt;
    if (!fields_finite(state, kt)) {
      std::ostringstream os;
      os << "non-finite scattered field after step " << state.step;
      fail(ErrorKind::instability, os.str());
    }
    sampler.record(state, tr.data);
  }
  return tr;
}

ScatteredRun run_scattered_lockstep(const BackgroundMedium& bg, const ObstacleSpec& obstacle,
                                    const SourceSpec& src, GridSpec grid,
                                    const std::string& store_path, const kernels::Table& kt) {
  MediumModel model{bg, obstacle, {}};
  GridSpec resolved = grid;
  const Lattice lat = prepare_grid(model, src, resolved);
  LockstepBackground live(bg, src, resolved, lat, kt);
  ScatteredRun out;
  if (store_path.empty()) {
    out.scattered = run_scattered(bg, obstacle, src, resolved, live, kt);
  } else {
    RecordingBackground rec(live, store_path);
    out.scattered = run_scattered(bg, obstacle, src, resolved, rec, kt);
  }
  out.background = live.take_trace();
  return out;
}

}  // namespace emenc
