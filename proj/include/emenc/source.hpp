#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "emenc/vec3.hpp"

namespace emenc {

enum class PulseFamily { poly_ramp, ramped_sine };

/// Temporal profile f(t) of the current density J = f(t) chi_B(x) a.
///
/// poly_ramp:   f = amplitude * t^k on [0, t_rise], then a C^1 quadratic blend over
///              [t_rise, 2 t_rise] to a constant. t_rise = inf disables the flattening.
/// ramped_sine: f = amplitude * sin(omega t) (1 - e^{-t/t_ramp}).
/// `offset` adds a constant; any nonzero offset violates f(0) = 0 and is rejected by validate().
struct PulseSpec {
  PulseFamily family = PulseFamily::poly_ramp;
  int k = 1;
  double t_rise = 0.5;
  double omega = 2.0 * M_PI;
  double t_ramp = 0.25;
  double amplitude = 1.0;
  double offset = 0.0;
  /// Exponent gamma for which tau^gamma |f~(tau)| is expected to stay bounded away from 0.
  double gamma_witness = 2.0;

  static PulseSpec linear_ramp(double t_rise = 0.5);
  static PulseSpec ramped_sine(double omega, double t_ramp = 0.25);

  double value(double t) const;
  /// Throws invalid_pulse unless f(0) = 0 and parameters are admissible.
  void validate() const;
};

/// f~(tau) = integral_0^T e^{-tau t} f(t) dt in closed form.
double laplace_pulse(const PulseSpec& pulse, double T, double tau);

/// f~(tau) from the piecewise-linear interpolant of f sampled at n_intervals + 1 points.
double laplace_pulse_sampled(const PulseSpec& pulse, double T, double tau, std::size_t n_intervals);

struct PulseDecayReport {
  double slope = 0.0;          ///< fitted d log|f~| / d log tau over the upper half of the grid
  bool consistent = false;     ///< slope <= -3/2 + 0.1
  double min_scaled = 0.0;     ///< min over the grid of tau^gamma |f~(tau)|
  double max_scaled = 0.0;
};

/// Throws invalid_pulse for f(0) != 0 and degenerate_pulse if f~ vanishes on the whole grid.
PulseDecayReport verify_pulse_decay(const PulseSpec& pulse, double T, std::span<const double> taus);

/// Ball source B(p, eta) with polarization a and record duration T.
struct SourceSpec {
  Vec3 p;
  double eta = 0.05;
  Vec3 a{0, 0, 1};
  PulseSpec pulse;
  double T = 1.0;

  /// |a| = 1 to 1e-12, eta > 0, T > 0, valid pulse.
  void validate() const;
  double ball_volume() const { return 4.0 / 3.0 * M_PI * eta * eta * eta; }
};

/// Two-column CSV (t, f(t)) with a header row.
void write_pulse_csv(std::ostream& os, const PulseSpec& pulse, double T, std::size_t n_intervals);

}  // namespace emenc
