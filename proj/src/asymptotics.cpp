#include "emenc/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/Dense>
#include <json.hpp>

#include "emenc/error.hpp"
#include "emenc/fingerprint.hpp"
#include "emenc/indicator.hpp"
#include "emenc/reflector.hpp"

namespace emenc {

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::J_full: return "J_full";
    case Quantity::J_perp: return "J_perp";
    case Quantity::lemma32_upper_combo: return "lemma32_upper_combo";
    case Quantity::lemma32_lower_combo: return "lemma32_lower_combo";
  }
  return "?";
}

Quantity quantity_from_string(const std::string& s) {
  for (Quantity q : {Quantity::J_full, Quantity::J_perp, Quantity::lemma32_upper_combo,
                     Quantity::lemma32_lower_combo})
    if (s == to_string(q)) return q;
  fail(ErrorKind::config, "unknown scaling quantity '" + s + "'");
}

namespace {

LogValue from_shell(const ShellIntegral& s, double extra_log = 0.0) {
  return LogValue::from_double(s.value) * LogValue{s.log_offset + extra_log, 1};
}

}  // namespace

LogValue energy_integral_D(Quantity q, const ObstacleSpec& obstacle, const SourceSpec& src,
                           const BackgroundMedium& bg, double tau, const ShellQuadOptions& quad) {
  const LaplaceParams lp = LaplaceParams::make(bg, tau);
  dist_D_B(obstacle.shape, src.p, src.eta);
  switch (q) {
    case Quantity::J_full:
      return from_shell(shell_integral(obstacle.shape, src.p, 2.0 * lp.k,
                                       [](double r, const Vec3&) { return 1.0 / (r * r); }, quad));
    case Quantity::J_perp:
      return from_shell(shell_integral(
          obstacle.shape, src.p, 2.0 * lp.k,
          [&](double r, const Vec3& n) { return norm2(cross(src.a, n)) / (r * r); }, quad));
    case Quantity::lemma32_upper_combo:
    case Quantity::lemma32_lower_combo: {
      const TheoremBounds b = theorem11_bounds(lp, src, obstacle, bg, quad);
      return LogValue::from_double((q == Quantity::lemma32_upper_combo ? b.upper : b.lower) / tau);
    }
  }
  return {};
}

LogValue trivial_bound_J_full(const Shape& shape, const SourceSpec& src, const BackgroundMedium& bg,
                              double tau, const ShellQuadOptions& quad) {
  const double s = 2.0 * std::sqrt(bg.eps0 * bg.mu0) * tau;
  const double dist = shape.signed_distance(src.p);
  const ShellIntegral i = shell_integral(shape, src.p, s, [](double r, const Vec3&) { return 1.0 / r; }, quad);
  return from_shell(i, -std::log(dist));
}

ScalingFit fit_scaling(const std::vector<double>& taus, const std::vector<double>& log_values) {
  if (taus.size() != log_values.size()) fail(ErrorKind::config, "tau and value counts differ");
  if (taus.size() < 8) fail(ErrorKind::insufficient_data, "scaling fit needs at least 8 samples");
  const auto n = static_cast<Eigen::Index>(taus.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = taus[i];
    A(i, 1) = std::log(taus[i]);
    A(i, 2) = 1.0;
    b(i) = log_values[i];
  }
  const auto qr = A.colPivHouseholderQr();
  if (qr.rank() < 3) fail(ErrorKind::insufficient_data, "scaling fit is rank deficient (tau range too narrow)");
  const Eigen::VectorXd x = qr.solve(b);
  ScalingFit f{x(0), x(1), x(2), std::sqrt((A * x - b).squaredNorm() / static_cast<double>(n))};
  return f;
}

ScalingReport scaling_report(Quantity q, const ObstacleSpec& obstacle, const SourceSpec& src,
                             const BackgroundMedium& bg, const std::vector<double>& taus,
                             const ShellQuadOptions& quad) {
  ScalingReport r;
  r.quantity = q;
  r.taus = taus;
  std::vector<double> logs;
  for (double t : taus) {
    const LogValue v = energy_integral_D(q, obstacle, src, bg, t, quad);
    if (v.is_zero()) fail(ErrorKind::accuracy, "scaling quantity vanished on the tau grid");
    r.values.push_back(v);
    logs.push_back(v.log_abs);
  }
  r.fit = fit_scaling(taus, logs);
  const double dist = obstacle.shape.signed_distance(src.p);
  r.expected_rate = -2.0 * std::sqrt(bg.mu0 * bg.eps0) * dist;
  if (q == Quantity::J_full) {
    r.kappa_expected = 2;
  } else {
    try {
      const ReflectorReport rep = first_reflector(obstacle.shape, src.p, src.a);
      r.kappa_expected = rep.flags.b3 ? 2 : 3;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::unsupported_geometry) throw;
      r.kappa_expected = 2;
    }
  }
  Canon c;
  c.add("q", std::string_view(to_string(q)));
  for (int a = 0; a < 3; ++a) c.add("p", src.p[a]).add("a", src.a[a]);
  c.add("eta", src.eta).add("dist", dist).add("eps0", bg.eps0).add("mu0", bg.mu0).add("sigma0", bg.sigma0);
  for (double t : taus) c.add("tau", t);
  r.fingerprint = c.hash();
  return r;
}

void write_scaling_csv(std::ostream& os, const ScalingReport& r) {
  os << "# fingerprint=" << r.fingerprint << "\n";
  os << "tau,log_value,sign,quantity\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < r.taus.size(); ++i)
    os << r.taus[i] << "," << r.values[i].log_abs << "," << r.values[i].sign << "," << to_string(r.quantity) << "\n";
}

std::string scaling_json(const ScalingReport& r) {
  nlohmann::json j;
  j["quantity"] = to_string(r.quantity);
  j["fitted_exponential_rate"] = r.fit.rate;
  j["fitted_polynomial_power"] = r.fit.power;
  j["constant"] = r.fit.constant;
  j["residual"] = r.fit.residual;
  j["expected_rate"] = r.expected_rate;
  j["kappa_expected"] = r.kappa_expected;
  j["tau_range"] = {r.taus.front(), r.taus.back()};
  j["fingerprint"] = r.fingerprint;
  return j.dump(2);
}

double lemma32_lhs_315(double eps0, double mu0, double eps, double mu) {
  return (eps0 / eps) * (eps0 - eps) + (mu - mu0) * eps0 / mu0;
}

double lemma32_lhs_317(double eps0, double mu0, double eps, double mu) {
  return (eps0 - eps) + (eps0 / mu) * (mu - mu0);
}

Lemma32Margins lemma32_margins(const ObstacleSpec& obstacle, const BackgroundMedium& bg) {
  Lemma32Margins m;
  auto eval = [&](const Vec3& x) {
    const double eps = bg.eps0 * obstacle.eps_r(x), mu = bg.mu0 * obstacle.mu_r(x);
    return std::pair{lemma32_lhs_315(bg.eps0, bg.mu0, eps, mu), lemma32_lhs_317(bg.eps0, bg.mu0, eps, mu)};
  };
  if (obstacle.e_pert.is_constant() && obstacle.m_pert.is_constant()) {
    std::tie(m.lhs_315_sup, m.lhs_317_inf) = eval({});
    return m;
  }
  m.lhs_315_sup = -std::numeric_limits<double>::infinity();
  m.lhs_317_inf = std::numeric_limits<double>::infinity();
  for (const Vec3& x : interior_samples(obstacle.shape, kMaterialSamples)) {
    const auto [u, l] = eval(x);
    m.lhs_315_sup = std::max(m.lhs_315_sup, u);
    m.lhs_317_inf = std::min(m.lhs_317_inf, l);
  }
  return m;
}

}  // namespace emenc
