#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emenc/fdtd/trace.hpp"
#include "emenc/medium.hpp"
#include "emenc/source.hpp"

namespace emenc {

/// Largest wave speed 1/sqrt(eps mu) over background and obstacle (sampled for callables).
double max_wave_speed(const MediumModel& model);

/// Checks that B and D sit inside the box (two-cell margin) and, for PEC walls, that no wave
/// leaving B can reflect off a wall and return to B within T: 2 dist(B, walls) >= c_max T + h.
/// Throws config otherwise.
void check_domain(const Lattice& lat, const GridSpec& grid, const MediumModel& model,
                  const SourceSpec& src, double c_max);

/// Stable fingerprint of everything that determines a run's output.
std::string run_fingerprint(const MediumModel& model, const SourceSpec& src, const GridSpec& grid);

/// Resolves dt / n_steps and validates the domain; returns the lattice.
Lattice prepare_grid(const MediumModel& model, const SourceSpec& src, GridSpec& grid);

/// Full-field run from zero initial data; mode is background without obstacle.
TraceRecord run_simulation(const BackgroundMedium& bg, const std::optional<ObstacleSpec>& obstacle,
                           const SourceSpec& src, GridSpec grid,
                           const kernels::Table& kt = kernels::best());

/// Same run, additionally recording E at `probes` (unit weights, same mode).
struct ProbedRun {
  TraceRecord trace;
  TraceRecord probes;
};
ProbedRun run_simulation_probed(const BackgroundMedium& bg, const std::optional<ObstacleSpec>& obstacle,
                                const SourceSpec& src, GridSpec grid, const std::vector<Vec3>& probes,
                                const kernels::Table& kt = kernels::best());

/// Sites where the obstacle coefficients differ from the background, with the coefficients
/// of the equivalent volume sources of the scattered-field update:
///   E_s += -alpha (E0^{n+1} - E0^n) - beta (E0^{n+1} + E0^n)
///          alpha = cb h (eps - eps0) / dt,  beta = cb h (sigma - sigma0) / 2
///   H_s += -gamma (H0^{n+1/2} - H0^{n-1/2}),  gamma = (mu - mu0) / mu
/// These are the exact differences of the total and background discrete updates.
struct ContrastSites {
  std::array<std::vector<std::size_t>, 3> e_idx;
  std::array<std::vector<double>, 3> alpha;
  std::array<std::vector<double>, 3> beta;
  std::array<std::vector<std::size_t>, 3> h_idx;
  std::array<std::vector<double>, 3> gamma;

  std::size_t e_count() const { return e_idx[0].size() + e_idx[1].size() + e_idx[2].size(); }
  std::size_t h_count() const { return h_idx[0].size() + h_idx[1].size() + h_idx[2].size(); }
};

ContrastSites find_contrast(const FieldState& total, const FieldState& background);

/// Supplies background values at the contrast sites, one step at a time (component-major
/// order of ContrastSites).
class BackgroundStream {
 public:
  virtual ~BackgroundStream() = default;
  virtual void attach(const ContrastSites& sites, const std::string& fingerprint,
                      std::size_t n_steps) = 0;
  virtual void advance_H(std::vector<double>& h_new) = 0;
  virtual void advance_E(std::vector<double>& e_new) = 0;
};

/// Background solver advanced in lockstep with the scattered solver; also records the
/// background trace on B.
class LockstepBackground : public BackgroundStream {
 public:
  LockstepBackground(const BackgroundMedium& bg, const SourceSpec& src, const GridSpec& grid,
                     const Lattice& lat, const kernels::Table& kt);
  void attach(const ContrastSites& sites, const std::string& fingerprint, std::size_t n_steps) override;
  void advance_H(std::vector<double>& h_new) override;
  void advance_E(std::vector<double>& e_new) override;
  TraceRecord take_trace();

 private:
  SourceSpec src_;
  GridSpec grid_;
  const kernels::Table& kt_;
  FieldState state_;
  SourceStamp stamp_;
  TraceSampler sampler_;
  const ContrastSites* sites_ = nullptr;
  TraceRecord trace_;
};

/// Writes every value it forwards to a background-volume store file (magic "EMBGVOL1").
class RecordingBackground : public BackgroundStream {
 public:
  RecordingBackground(BackgroundStream& inner, std::string path);
  void attach(const ContrastSites& sites, const std::string& fingerprint, std::size_t n_steps) override;
  void advance_H(std::vector<double>& h_new) override;
  void advance_E(std::vector<double>& e_new) override;

 private:
  BackgroundStream& inner_;
  std::string path_;
  std::ofstream out_;
};

/// Replays a background-volume store. Throws dependency if the file is missing, or if its
/// fingerprint or site layout does not match the scattered run.
class StoredBackground : public BackgroundStream {
 public:
  explicit StoredBackground(std::string path);
  void attach(const ContrastSites& sites, const std::string& fingerprint, std::size_t n_steps) override;
  void advance_H(std::vector<double>& h_new) override;
  void advance_E(std::vector<double>& e_new) override;

 private:
  std::string path_;
  std::ifstream in_;
};

/// Evolves E - E0, H - H0 driven by the equivalent sources on D; mode scattered.
TraceRecord run_scattered(const BackgroundMedium& bg, const ObstacleSpec& obstacle,
                          const SourceSpec& src, GridSpec grid, BackgroundStream& background,
                          const kernels::Table& kt = kernels::best());

struct ScatteredRun {
  TraceRecord scattered;
  TraceRecord background;
};

/// Scattered run with a lockstep background; returns both traces. If store_path is given the
/// background volume is also written there.
ScatteredRun run_scattered_lockstep(const BackgroundMedium& bg, const ObstacleSpec& obstacle,
                                    const SourceSpec& src, GridSpec grid,
                                    const std::string& store_path = "",
                                    const kernels::Table& kt = kernels::best());

}  // namespace emenc
