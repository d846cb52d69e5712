#include "emenc/source.hpp"

#include <cmath>
#include <complex>
#include <ostream>

#include "emenc/error.hpp"
#include "emenc/laplace.hpp"

namespace emenc {

PulseSpec PulseSpec::linear_ramp(double t_rise) {
  PulseSpec p;
  p.family = PulseFamily::poly_ramp;
  p.k = 1;
  p.t_rise = t_rise;
  p.gamma_witness = 2.0;
  return p;
}

PulseSpec PulseSpec::ramped_sine(double omega, double t_ramp) {
  PulseSpec p;
  p.family = PulseFamily::ramped_sine;
  p.omega = omega;
  p.t_ramp = t_ramp;
  p.gamma_witness = 3.0;
  return p;
}

namespace {

struct RampPieces {
  double fr = 0.0;   // f(t_rise)
  double dfr = 0.0;  // f'(t_rise)
  double w = 0.0;    // blend width
  double plateau = 0.0;
};

RampPieces ramp_pieces(const PulseSpec& p) {
  RampPieces r;
  r.fr = std::pow(p.t_rise, p.k);
  r.dfr = p.k * std::pow(p.t_rise, p.k - 1);
  r.w = p.t_rise;
  r.plateau = r.fr + 0.5 * r.dfr * r.w;
  return r;
}

double poly_ramp_value(const PulseSpec& p, double t) {
  if (t <= 0.0) return 0.0;
  if (!std::isfinite(p.t_rise) || t <= p.t_rise) return std::pow(t, p.k);
  const auto r = ramp_pieces(p);
  const double s = t - p.t_rise;
  if (s >= r.w) return r.plateau;
  return r.fr + r.dfr * s - r.dfr * s * s / (2.0 * r.w);
}

double poly_ramp_laplace(const PulseSpec& p, double T, double tau) {
  if (!std::isfinite(p.t_rise) || T <= p.t_rise) return exp_moment(p.k, tau, T);
  const auto r = ramp_pieces(p);
  double sum = exp_moment(p.k, tau, p.t_rise);
  const double len = std::min(T - p.t_rise, r.w);
  const double blend = r.fr * exp_moment(0, tau, len) + r.dfr * exp_moment(1, tau, len) -
                       r.dfr / (2.0 * r.w) * exp_moment(2, tau, len);
  sum += std::exp(-tau * p.t_rise) * blend;
  const double t_flat = p.t_rise + r.w;
  if (T > t_flat) sum += r.plateau * std::exp(-tau * t_flat) * exp_moment(0, tau, T - t_flat);
  return sum;
}

// integral_0^T sin(omega t) e^{-alpha t} dt
double damped_sine_integral(double omega, double alpha, double T) {
  const std::complex<double> z(alpha, -omega);
  const std::complex<double> tail = std::exp(-z * T);
  return std::imag((1.0 - tail) / z);
}

}  // namespace

double PulseSpec::value(double t) const {
  double f = 0.0;
  if (t > 0.0) {
    if (family == PulseFamily::poly_ramp) {
      f = poly_ramp_value(*this, t);
    } else {
      f = std::sin(omega * t) * -std::expm1(-t / t_ramp);
    }
  }
  return amplitude * f + offset;
}

void PulseSpec::validate() const {
  if (offset != 0.0) fail(ErrorKind::invalid_pulse, "pulse offset makes f(0) nonzero");
  if (!std::isfinite(amplitude)) fail(ErrorKind::invalid_pulse, "pulse amplitude must be finite");
  if (family == PulseFamily::poly_ramp) {
    if (k < 1) fail(ErrorKind::invalid_pulse, "poly_ramp requires k >= 1");
    if (!(t_rise > 0.0)) fail(ErrorKind::invalid_pulse, "poly_ramp requires t_rise > 0");
  } else {
    if (!(omega > 0.0) || !std::isfinite(omega))
      fail(ErrorKind::invalid_pulse, "ramped_sine requires omega > 0");
    if (!(t_ramp > 0.0)) fail(ErrorKind::invalid_pulse, "ramped_sine requires t_ramp > 0");
  }
  if (value(0.0) != 0.0) fail(ErrorKind::invalid_pulse, "f(0) must vanish");
}

double laplace_pulse(const PulseSpec& pulse, double T, double tau) {
  double core = 0.0;
  if (pulse.amplitude != 0.0) {
    if (pulse.family == PulseFamily::poly_ramp) {
      core = poly_ramp_laplace(pulse, T, tau);
    } else {
      core = damped_sine_integral(pulse.omega, tau, T) -
             damped_sine_integral(pulse.omega, tau + 1.0 / pulse.t_ramp, T);
    }
  }
  return pulse.amplitude * core + pulse.offset * exp_moment(0, tau, T);
}

double laplace_pulse_sampled(const PulseSpec& pulse, double T, double tau,
                             std::size_t n_intervals) {
  std::vector<double> f(n_intervals + 1);
  const double dt = T / static_cast<double>(n_intervals);
  for (std::size_t n = 0; n <= n_intervals; ++n) f[n] = pulse.value(dt * static_cast<double>(n));
  return pl_laplace(f, dt, tau);
}

PulseDecayReport verify_pulse_decay(const PulseSpec& pulse, double T,
                                    std::span<const double> taus) {
  pulse.validate();
  if (taus.size() < 2) fail(ErrorKind::insufficient_data, "pulse decay check needs >= 2 taus");
  std::vector<double> lx, ly;
  PulseDecayReport rep;
  rep.min_scaled = std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double ft = std::abs(laplace_pulse(pulse, T, taus[i]));
    if (ft > 0.0 && std::isfinite(ft)) any_nonzero = true;
    const double scaled = ft * std::pow(taus[i], pulse.gamma_witness);
    rep.min_scaled = std::min(rep.min_scaled, scaled);
    rep.max_scaled = std::max(rep.max_scaled, scaled);
    if (i >= taus.size() / 2 && ft > 0.0) {
      lx.push_back(std::log(taus[i]));
      ly.push_back(std::log(ft));
    }
  }
  if (!any_nonzero) fail(ErrorKind::degenerate_pulse, "Laplace transform of the pulse vanishes");
  if (lx.size() < 2) fail(ErrorKind::degenerate_pulse, "too few nonzero transform samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.slope = sxy / sxx;
  rep.consistent = rep.slope <= -1.5 + 0.1;
  return rep;
}

void SourceSpec::validate() const {
  if (std::abs(norm(a) - 1.0) > 1e-12) fail(ErrorKind::config, "polarization must be a unit vector");
  if (!(eta > 0.0)) fail(ErrorKind::config, "source radius eta must be positive");
  if (!(T > 0.0)) fail(ErrorKind::config, "record duration T must be positive");
  pulse.validate();
}

void write_pulse_csv(std::ostream& os, const PulseSpec& pulse, double T, std::size_t n_intervals) {
  os << "t,f\n";
  os.precision(17);
  for (std::size_t n = 0; n <= n_intervals; ++n) {
    const double t = T * static_cast<double>(n) / static_cast<double>(n_intervals);
    os << t << ',' << pulse.value(t) << '\n';
  }
}

}  // namespace emenc
