#include "emenc/analytic.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "emenc/error.hpp"

namespace emenc {

LaplaceParams LaplaceParams::make(const BackgroundMedium& bg, double tau) {
  bg.validate();
  if (!(tau > 0.0)) fail(ErrorKind::config, "tau must be positive");
  LaplaceParams lp;
  lp.tau = tau;
  lp.eps0_t = bg.eps0 + bg.sigma0 / tau;
  lp.mu0 = bg.mu0;
  lp.k = tau * std::sqrt(bg.mu0 * lp.eps0_t);
  return lp;
}

double phi_xi(double xi) {
  if (std::abs(xi) < 0.1) {
    // sum_m 2m xi^{2m+1} / (2m+1)!
    double term = xi;  // xi^{2m+1} / (2m+1)!
    double sum = 0.0;
    for (int m = 1; m < 10; ++m) {
      term *= xi * xi / ((2.0 * m) * (2.0 * m + 1));
      sum += 2.0 * m * term;
    }
    return sum;
  }
  return xi * std::cosh(xi) - std::sinh(xi);
}

double log_phi_xi(double xi) {
  if (xi < 20.0) return std::log(phi_xi(xi));
  return xi + std::log((xi - 1.0) + (xi + 1.0) * std::exp(-2.0 * xi)) - std::log(2.0);
}

double FarFieldFrame::log_scale() const {
  return log_K + std::log(std::abs(f_tilde)) + log_v;
}

FarFieldFrame far_field_frame(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x) {
  FarFieldFrame fr;
  const Vec3 d = x - src.p;
  fr.r = norm(d);
  if (!(fr.r > src.eta)) {
    std::ostringstream os;
    os << "exterior closed form requested at |x - p| = " << fr.r << " <= eta = " << src.eta
       << "; use eval_V0_interior";
    fail(ErrorKind::wrong_branch, os.str());
  }
  fr.n = d / fr.r;
  const double k = lp.k, r = fr.r;
  const double c = 1.0 / r + 1.0 / (k * r * r);
  fr.A_coef = 1.0 + c / k;
  fr.B_coef = 1.0 + 3.0 * c / k;
  fr.log_v = -k * r - std::log(r);
  fr.log_K = std::log(lp.mu0 * lp.tau) + log_phi_xi(k * src.eta) - 3.0 * std::log(k);
  fr.f_tilde = laplace_pulse(src.pulse, src.T, lp.tau);
  return fr;
}

V0Fields eval_V0_fields_scaled(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                               double& log_scale) {
  const FarFieldFrame fr = far_field_frame(lp, src, x);
  const double sgn = fr.f_tilde >= 0.0 ? 1.0 : -1.0;
  log_scale = fr.log_scale();
  const Vec3 Ma = src.a * fr.A_coef - fr.n * (fr.B_coef * dot(fr.n, src.a));
  V0Fields out;
  out.Ve = Ma * sgn;
  // grad v = -(k + 1/r) n v
  const Vec3 grad_hat = fr.n * (-(lp.k + 1.0 / fr.r));
  out.Vm = cross(grad_hat, Ma) * (-sgn / (lp.tau * lp.mu0));
  out.Vm_curl = cross(grad_hat, src.a) * (-sgn / (lp.tau * lp.mu0));
  return out;
}

V0Fields eval_V0_fields(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x) {
  double ls = 0.0;
  V0Fields f = eval_V0_fields_scaled(lp, src, x, ls);
  const double s = std::exp(ls);
  return {f.Ve * s, f.Vm * s, f.Vm_curl * s};
}

namespace {

// 1 - (1 + x) e^{-x}
double one_minus_ramp(double x) {
  if (x < 0.1) {
    // sum_{m>=2} (-1)^m (m-1) x^m / m!
    double term = x;  // x^m / m!
    double sum = 0.0;
    for (int m = 2; m < 14; ++m) {
      term *= x / m;
      sum += ((m % 2 == 0) ? 1.0 : -1.0) * (m - 1) * term;
    }
    return sum;
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

// sinh(x)/x - 1
double sinhc_minus_one(double x) {
  if (x < 0.1) {
    double term = 1.0, sum = 0.0;
    for (int m = 1; m < 8; ++m) {
      term *= x * x / ((2.0 * m) * (2.0 * m + 1));
      sum += term;
    }
    return sum;
  }
  return std::sinh(x) / x - 1.0;
}

}  // namespace

RadialJet ball_potential(double k, double eta, double r, double interior_scale) {
  return ball_potential_branch(k, eta, r, r < eta, interior_scale);
}

RadialJet ball_potential_branch(double k, double eta, double r, bool interior,
                                double interior_scale) {
  RadialJet j;
  const double k2 = k * k;
  if (!interior) {
    const double a = phi_xi(k * eta) / (k2 * k);
    const double v = std::exp(-k * r) / r;
    const double q = k + 1.0 / r;
    j.f = a * v;
    j.df = -q * j.f;
    j.d2f = (q * q + 1.0 / (r * r)) * j.f;
    return j;
  }
  const double C = interior_scale * (1.0 + k * eta) * std::exp(-k * eta);
  const double one_minus_C = one_minus_ramp(k * eta) + (1.0 - interior_scale) * (C / interior_scale);
  const double x = k * r;
  double g, dg_over_r, d2g;
  if (x < 0.05) {
    // g = sum (kr)^{2m}/(2m+1)!; g'/r and g'' from the same series.
    g = 0.0;
    dg_over_r = 0.0;
    d2g = 0.0;
    double t = 1.0;  // x^{2m} / (2m+1)!
    for (int m = 0; m < 8; ++m) {
      g += t;
      if (m >= 1) {
        dg_over_r += 2.0 * m * t / (r == 0.0 ? 1.0 : r * r);
        d2g += 2.0 * m * (2.0 * m - 1.0) * t / (r == 0.0 ? 1.0 : r * r);
      }
      t *= x * x / ((2.0 * m + 2) * (2.0 * m + 3));
    }
    if (r == 0.0) {
      dg_over_r = k2 / 3.0;
      d2g = k2 / 3.0;
    }
  } else {
    g = std::sinh(x) / x;
    const double dg = phi_xi(x) / (k * r * r);
    dg_over_r = dg / r;
    d2g = k2 * g - 2.0 * dg_over_r;
  }
  j.f = (one_minus_C - C * sinhc_minus_one(x)) / k2;
  j.df = -C * dg_over_r * r / k2;
  j.d2f = -C * d2g / k2;
  return j;
}

namespace {

Vec3 ve0_from_potential(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                        double interior_scale) {
  const Vec3 d = x - src.p;
  const double r = norm(d);
  const double k = lp.k;
  const RadialJet j = ball_potential(k, src.eta, r, interior_scale);
  // Hess Phi = Phi'' n n^T + (Phi'/r)(I - n n^T); isotropic at r = 0.
  const double dphi_over_r = r == 0.0 ? j.d2f : j.df / r;
  const Vec3 n = r == 0.0 ? Vec3{} : d / r;
  const Vec3 hess_a = src.a * dphi_over_r + n * ((j.d2f - dphi_over_r) * dot(src.a, n));
  const double ft = laplace_pulse(src.pulse, src.T, lp.tau);
  return (src.a * j.f - hess_a / (k * k)) * (lp.tau * lp.mu0 * ft);
}

}  // namespace

Vec3 eval_V0_interior(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                      double interior_scale) {
  const double r = distance(x, src.p);
  if (!(r < src.eta)) {
    std::ostringstream os;
    os << "interior form requested at |x - p| = " << r << " >= eta = " << src.eta;
    fail(ErrorKind::wrong_branch, os.str());
  }
  return ve0_from_potential(lp, src, x, interior_scale);
}

Vec3 eval_Ve0(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x) {
  if (distance(x, src.p) <= src.eta) return ve0_from_potential(lp, src, x, 1.0);
  return eval_V0_fields(lp, src, x).Ve;
}

double residual_3_1(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x,
                    const Vec3& grid_Ve) {
  return norm(grid_Ve - eval_V0_fields(lp, src, x).Ve);
}

Lemma31Norms lemma31_norms(const LaplaceParams& lp, const SourceSpec& src, const Vec3& x) {
  const FarFieldFrame fr = far_field_frame(lp, src, x);
  const double axn2 = norm2(cross(src.a, fr.n));
  const double an = dot(src.a, fr.n);
  const double A = fr.A_coef, B = fr.B_coef;
  Lemma31Norms out;
  out.ve2_hat = A * A * axn2 + (B - A) * (B - A) * an * an;
  const double c = std::sqrt(lp.eps0_t / lp.mu0) + 1.0 / (lp.tau * lp.mu0 * fr.r);
  out.vm2_hat = c * c * A * A * axn2;
  out.log_scale2 = 2.0 * fr.log_scale();
  const double s = std::exp(out.log_scale2);
  out.ve2 = s * out.ve2_hat;
  out.vm2 = s * out.vm2_hat;
  return out;
}

void write_radial_profile_csv(std::ostream& os, double k, double eta,
                              std::span<const double> radii) {
  os << "r,phi,dphi,d2phi\n";
  os.precision(17);
  for (double r : radii) {
    const RadialJet j = ball_potential(k, eta, r);
    os << r << ',' << j.f << ',' << j.df << ',' << j.d2f << '\n';
  }
}

}  // namespace emenc
