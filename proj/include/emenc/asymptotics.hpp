#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "emenc/analytic.hpp"
#include "emenc/log_value.hpp"
#include "emenc/medium.hpp"
#include "emenc/shell_quadrature.hpp"
#include "emenc/source.hpp"

namespace emenc {

enum class Quantity {
  J_full,               ///< integral_D v^2
  J_perp,               ///< integral_D v^2 |a x n|^2
  lemma32_upper_combo,  ///< integral_D (e0~/e~)(e0~ - e~)|Ve0|^2 + (mu - mu0)|Vm0|^2
  lemma32_lower_combo,  ///< integral_D (e0~ - e~)|Ve0|^2 + (mu0/mu)(mu - mu0)|Vm0|^2
};
const char* to_string(Quantity q);
Quantity quantity_from_string(const std::string& s);

/// v = e^{-k r} / r, r = |x - p|. Combos need a piecewise-constant obstacle.
LogValue energy_integral_D(Quantity q, const ObstacleSpec& obstacle, const SourceSpec& src,
                           const BackgroundMedium& bg, double tau, const ShellQuadOptions& quad = {});

/// (1 / dist) integral_D e^{-s r} / r dx with s = 2 sqrt(eps0 mu0) tau, dist = dist({p}, dD):
/// an upper bound for J_full.
LogValue trivial_bound_J_full(const Shape& shape, const SourceSpec& src, const BackgroundMedium& bg,
                              double tau, const ShellQuadOptions& quad = {});

struct ScalingFit {
  double rate = 0.0;   ///< coefficient of tau
  double power = 0.0;  ///< coefficient of log tau
  double constant = 0.0;
  double residual = 0.0;
};

/// log J = rate tau + power log tau + c by least squares. Throws insufficient_data for fewer than
/// 8 samples or a rank-deficient design.
ScalingFit fit_scaling(const std::vector<double>& taus, const std::vector<double>& log_values);

struct ScalingReport {
  Quantity quantity = Quantity::J_full;
  std::vector<double> taus;
  std::vector<LogValue> values;
  ScalingFit fit;
  double expected_rate = 0.0;  ///< -2 sqrt(mu0 eps0) dist({p}, dD)
  int kappa_expected = 2;
  std::string fingerprint;
};

/// Evaluates the quantity on the tau grid and fits it. kappa_expected follows the reflector
/// flags: 2 when the polarization is not normal at some reflector point, else 3; J_full is 2.
ScalingReport scaling_report(Quantity q, const ObstacleSpec& obstacle, const SourceSpec& src,
                             const BackgroundMedium& bg, const std::vector<double>& taus,
                             const ShellQuadOptions& quad = {});

/// tau, log_value, quantity (plus sign for the combos).
void write_scaling_csv(std::ostream& os, const ScalingReport& r);
std::string scaling_json(const ScalingReport& r);

struct Lemma32Margins {
  double lhs_315_sup = 0.0;  ///< sup_D (eps0/eps)(eps0 - eps) + (mu - mu0) eps0/mu0
  double lhs_317_inf = 0.0;  ///< inf_D (eps0 - eps) + (eps0/mu)(mu - mu0)
  double margin_315() const { return -lhs_315_sup; }
  double margin_317() const { return lhs_317_inf; }
};

/// Sampled over D for callable fields (the conditions involve eps, mu only).
Lemma32Margins lemma32_margins(const ObstacleSpec& obstacle, const BackgroundMedium& bg);

/// Pointwise left-hand sides for a homogeneous material.
double lemma32_lhs_315(double eps0, double mu0, double eps, double mu);
double lemma32_lhs_317(double eps0, double mu0, double eps, double mu);

}  // namespace emenc
