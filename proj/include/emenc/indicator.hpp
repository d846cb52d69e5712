#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emenc/analytic.hpp"
#include "emenc/fdtd/lattice.hpp"
#include "emenc/fdtd/trace.hpp"
#include "emenc/log_value.hpp"
#include "emenc/medium.hpp"
#include "emenc/shell_quadrature.hpp"
#include "emenc/source.hpp"

namespace emenc {

/// W(x) = integral_0^T e^{-tau t} E(x, t) dt per sample point (piecewise-linear in t, exact).
struct LaplaceTrace {
  double tau = 0.0;
  double T = 0.0;
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::vector<Vec3> W;
  TraceMode mode = TraceMode::background;
  std::string fingerprint;
};

LaplaceTrace laplace_transform_trace(const TraceRecord& trace, double tau);

/// f~(tau) sum_points weight a.(W - V). A scattered-mode trace already holds W - V and takes no
/// background. Throws incompatible on mismatched tau, points or weights, or a missing background.
LogValue indicator_I(const LaplaceTrace& total, const LaplaceTrace* background, const SourceSpec& src);

/// Same with V replaced by the analytic background field at the sample points. A scattered
/// trace needs its background trace to rebuild W. Throws unsupported_medium for a
/// non-constant background.
LogValue indicator_I_tilde(const LaplaceTrace& total, const LaplaceTrace* background,
                           const MediumModel& medium, const SourceSpec& src);

struct IndicatorCurve {
  std::vector<double> taus;
  std::vector<LogValue> values;
  std::string variant = "I";  ///< I, I_tilde or I_bold
  std::string fingerprint;
  double T = 0.0;
};

IndicatorCurve indicator_curve(const TraceRecord& total, const TraceRecord* background,
                               const SourceSpec& src, const std::vector<double>& taus);
IndicatorCurve indicator_tilde_curve(const TraceRecord& total, const TraceRecord* background,
                                     const MediumModel& medium, const SourceSpec& src,
                                     const std::vector<double>& taus);

/// count log-spaced values on [tau_max / span, tau_max], tau_max = 25 / (2 sqrt(mu0 eps0) d).
std::vector<double> default_tau_grid(double dist_guess, const BackgroundMedium& bg, int count = 16,
                                     double span = 8.0);

/// Sum of two single-direction curves. Throws config if the directions are dependent, or
/// incompatible if the grids differ.
IndicatorCurve indicator_bold(const IndicatorCurve& c1, const IndicatorCurve& c2, const Vec3& a1,
                              const Vec3& a2);

enum class FitModel {
  exponential,  ///< log|I| = slope tau + c
  compensated,  ///< log(|I| / S(tau)) = slope tau + power log tau + c, S the known source factor
};

struct ExtractOptions {
  FitModel model = FitModel::compensated;
  /// Source of the curve; required for the source-factor compensation (without it the
  /// compensated model still fits the log tau term).
  std::optional<SourceSpec> source;
  std::size_t min_clean = 8;
};

struct DistanceEstimate {
  double dist_est = 0.0;
  double slope = 0.0;  ///< fitted exponential rate, -2 sqrt(mu0 eps0) d
  double intercept = 0.0;
  double power = 0.0;  ///< log tau coefficient (compensated model)
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;  ///< rms of the fit
  double noise_floor_tau = 0.0;  ///< first discarded tau, or +inf if none
  std::size_t n_clean = 0;
  FitModel model = FitModel::compensated;
  std::vector<double> slope_curve;  ///< (1/tau) log|I(tau)| over the whole grid
};

/// log of tau K(tau)^2 f~(tau)^2 e^{-2 k eta}: the part of log|I| that does not depend on D.
double source_log_factor(const BackgroundMedium& bg, const SourceSpec& src, double tau);

/// Clean window: the leading run of nonzero samples, cut where the local slope of the fitted
/// quantity rises above half the median slope of the first third. Throws insufficient_data for
/// fewer than min_clean samples, and no_decay for a non-negative slope or when e^{tau T} I(tau)
/// does not grow on the window (then the curve carries only the truncation term).
DistanceEstimate extract_distance(const IndicatorCurve& curve, const BackgroundMedium& bg,
                                  const ExtractOptions& opt = {});

enum class SignClass { A_I_like, A_II_like, inconclusive };
const char* to_string(SignClass s);

/// Sign over the clean window [lo, hi].
SignClass classify_by_sign(const IndicatorCurve& curve, double window_lo, double window_hi);
SignClass classify_by_sign(const IndicatorCurve& curve, const DistanceEstimate& est);

struct TheoremBounds {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;  ///< upper - lower from its nonnegative closed form
  double ve_integral = 0.0;  ///< integral_D |Ve0|^2
  double vm_integral = 0.0;  ///< integral_D |Vm0|^2
};

/// upper = tau integral_D [(e0/e)(e0 - e)|Ve0|^2 + (mu - mu0)|Vm0|^2],
/// lower = tau integral_D [(e0 - e)|Ve0|^2 + (mu0/mu)(mu - mu0)|Vm0|^2], e = eps + sigma/tau.
/// Throws invalid_material for a non piecewise-constant obstacle and accuracy on quadrature
/// failure.
TheoremBounds theorem11_bounds(const LaplaceParams& lp, const SourceSpec& src,
                               const ObstacleSpec& obstacle, const BackgroundMedium& bg,
                               const ShellQuadOptions& quad = {});

struct SandwichPoint {
  double tau = 0.0;
  double I = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double slack = 0.0;
  bool inside = false;
};

struct SandwichReport {
  std::vector<SandwichPoint> points;
  double slack_coef = 0.0;  ///< C in slack = C tau^{-5/2} e^{-tau T}
  bool all_inside = false;
  bool ordered = false;     ///< upper >= lower at every evaluated tau
};

/// Compares I(tau) with the theorem bounds at the n_check largest clean-window tau values. The
/// slack coefficient is the largest excursion outside [lower, upper] over the rest of the
/// window, in units of tau^{-5/2} e^{-tau T}.
SandwichReport theorem11_sandwich(const IndicatorCurve& curve, const DistanceEstimate& est,
                                  const SourceSpec& src, const ObstacleSpec& obstacle,
                                  const BackgroundMedium& bg, std::size_t n_check = 3,
                                  const ShellQuadOptions& quad = {});

/// tau, sign, log_abs_I, I_over_exp, variant. I_over_exp = e^{tau T} I if representable.
void write_curve_csv(std::ostream& os, const IndicatorCurve& curve);
IndicatorCurve read_curve_csv(std::istream& is);
/// {dist_est, slope, intercept, window:[lo,hi], residual, noise_floor_tau, ...}
std::string distance_json(const DistanceEstimate& est);

}  // namespace emenc
