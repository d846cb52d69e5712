#pragma once

#include <iosfwd>
#include <span>
#include <utility>

#include "emenc/log_value.hpp"
#include "emenc/medium.hpp"
#include "emenc/source.hpp"
#include "emenc/vec3.hpp"

namespace emenc {

/// Laplace-domain constants for a constant background at parameter tau.
struct LaplaceParams {
  double tau = 1.0;
  double eps0_t = 1.0;  ///< eps0 + sigma0 / tau
  double mu0 = 1.0;
  double k = 1.0;       ///< tau * sqrt(mu0 * eps0_t)

  static LaplaceParams make(const BackgroundMedium& bg, double tau);
};

/// phi(xi) = xi cosh(xi) - sinh(xi).
double phi_xi(double xi);
/// log phi(xi) for xi > 0, overflow-free.
double log_phi_xi(double xi);

/// Exterior-point quantities entering the closed-form background fields.
struct FarFieldFrame {
  double r = 0.0;
  Vec3 n;
  double A_coef = 0.0;
  double B_coef = 0.0;
  double log_v = 0.0;   ///< log(e^{-kr}/r)
  double log_K = 0.0;   ///< log(mu0 tau phi(k eta) / k^3)
  double f_tilde = 0.0;

  double v() const { return std::exp(log_v); }
  double K_tau() const { return std::exp(log_K); }
  /// log|K f~ v|, the common scale of both fields.
  double log_scale() const;
};

FarFieldFrame far_field_frame(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x);

/// Vm is the closed form -(tau mu0)^{-1} K f~ grad(v) x (M a). Vm_curl is the exact
/// -(tau mu0)^{-1} curl Ve = -(tau mu0)^{-1} K f~ grad(v) x a; the two differ by the factor A.
struct V0Fields {
  Vec3 Ve;
  Vec3 Vm;
  Vec3 Vm_curl;
};

/// Exterior closed form. Throws wrong_branch for |x - p| <= eta.
V0Fields eval_V0_fields(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x);

/// Unit-scale directions of both fields: Ve = e^{log_scale} * Ve_hat, likewise Vm, with
/// log_scale = FarFieldFrame::log_scale(). Never underflows.
V0Fields eval_V0_fields_scaled(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                               double& log_scale);

/// Ball potential Phi = integral_B e^{-k|x-y|} / (4 pi |x-y|) dy as a function of r = |x - p|,
/// with its first two radial derivatives. `interior_scale` multiplies the interior constant
/// (1 + k eta) e^{-k eta}; it exists for mutation testing and is 1 in production.
struct RadialJet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};
RadialJet ball_potential(double k, double eta, double r, double interior_scale = 1.0);
/// One branch of the potential at any r > 0 (interior closed form or exterior closed form).
RadialJet ball_potential_branch(double k, double eta, double r, bool interior,
                                double interior_scale = 1.0);

/// Interior value tau mu0 f~ [Phi a - k^{-2} Hess(Phi) a]. Throws wrong_branch for |x - p| >= eta.
Vec3 eval_V0_interior(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                      double interior_scale = 1.0);

/// Either branch; on the sphere |x - p| = eta the exterior form is used.
Vec3 eval_Ve0(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x);

/// |grid_Ve - Ve0(x)| at an exterior point.
double residual_3_1(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                    const Vec3& grid_Ve);

struct Lemma31Norms {
  double ve2 = 0.0;
  double vm2 = 0.0;
  /// Both norms divided by (K f~ v)^2, i.e. the bracketed factors.
  double ve2_hat = 0.0;
  double vm2_hat = 0.0;
  double log_scale2 = 0.0;  ///< log (K f~ v)^2
};

/// |Ve0|^2 = K^2 f~^2 v^2 [A^2 |a x n|^2 + (B - A)^2 (a.n)^2],
/// |Vm0|^2 = K^2 f~^2 v^2 (sqrt(eps0_t / mu0) + 1 / (tau mu0 r))^2 A^2 |a x n|^2.
Lemma31Norms lemma31_norms(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x);

/// CSV of r, Phi, Phi', Phi'' over the given radii.
void write_radial_profile_csv(std::ostream& os, double k, double eta, std::span<const double> radii);

}  // namespace emenc
