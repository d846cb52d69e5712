#include "emenc/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "emenc/error.hpp"
#include "emenc/laplace.hpp"

namespace emenc {

namespace {

struct Neumaier {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

void check_compatible(const LaplaceTrace& a, const LaplaceTrace& b) {
  if (a.tau != b.tau) fail(ErrorKind::incompatible, "Laplace traces at different tau");
  if (a.points.size() != b.points.size()) fail(ErrorKind::incompatible, "traces have different sample points");
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.weights[i] != b.weights[i] || distance(a.points[i], b.points[i]) > 1e-12)
      fail(ErrorKind::incompatible, "traces have different sample points or weights");
  }
}

double f_tilde(const SourceSpec& src, double tau) { return laplace_pulse(src.pulse, src.T, tau); }

LogValue weighted_projection(const LaplaceTrace& t, const std::vector<Vec3>& diff, const SourceSpec& src) {
  Neumaier acc;
  for (std::size_t i = 0; i < diff.size(); ++i) acc.add(t.weights[i] * dot(src.a, diff[i]));
  return LogValue::from_double(f_tilde(src, t.tau)) * LogValue::from_double(acc.value());
}

}  // namespace

LaplaceTrace laplace_transform_trace(const TraceRecord& tr, double tau) {
  if (!(tau > 0.0)) fail(ErrorKind::config, "tau must be positive");
  if (tr.samples < 2) fail(ErrorKind::insufficient_data, "trace has fewer than two samples");
  LaplaceTrace out;
  out.tau = tau;
  out.T = tr.duration();
  out.points = tr.points;
  out.weights = tr.weights;
  out.mode = tr.mode;
  out.fingerprint = tr.fingerprint;
  const std::vector<double> w = pl_laplace_weights(tau, tr.dt, tr.samples);
  const std::size_t np = tr.points.size();
  out.W.assign(np, Vec3{0, 0, 0});
  std::vector<Neumaier> acc(np * 3);
  for (std::size_t n = 0; n < tr.samples; ++n) {
    const double* row = tr.data.data() + n * np * 3;
    for (std::size_t q = 0; q < np * 3; ++q) acc[q].add(w[n] * row[q]);
  }
  for (std::size_t p = 0; p < np; ++p)
    out.W[p] = {acc[3 * p].value(), acc[3 * p + 1].value(), acc[3 * p + 2].value()};
  return out;
}

LogValue indicator_I(const LaplaceTrace& total, const LaplaceTrace* background, const SourceSpec& src) {
  std::vector<Vec3> diff = total.W;
  if (total.mode == TraceMode::scattered) {
    if (background) check_compatible(total, *background);
  } else {
    if (total.mode != TraceMode::total_with_obstacle)
      fail(ErrorKind::incompatible, "indicator needs a total or scattered trace");
    if (!background || background->mode != TraceMode::background)
      fail(ErrorKind::incompatible, "total-field indicator needs a background trace");
    check_compatible(total, *background);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = diff[i] - background->W[i];
  }
  return weighted_projection(total, diff, src);
}

LogValue indicator_I_tilde(const LaplaceTrace& total, const LaplaceTrace* background,
                           const MediumModel& medium, const SourceSpec& src) {
  if (medium.background_field)
    fail(ErrorKind::unsupported_medium, "analytic background fields need a constant background");
  std::vector<Vec3> W = total.W;
  if (total.mode == TraceMode::scattered) {
    if (!background) fail(ErrorKind::incompatible, "scattered trace needs its background to rebuild W");
    check_compatible(total, *background);
    for (std::size_t i = 0; i < W.size(); ++i) W[i] = W[i] + background->W[i];
  }
  const LaplaceParams lp = LaplaceParams::make(medium.bg, total.tau);
  for (std::size_t i = 0; i < W.size(); ++i) W[i] = W[i] - eval_Ve0(lp, src, total.points[i]);
  return weighted_projection(total, W, src);
}

IndicatorCurve indicator_curve(const TraceRecord& total, const TraceRecord* background,
                               const SourceSpec& src, const std::vector<double>& taus) {
  IndicatorCurve c;
  c.taus = taus;
  c.variant = "I";
  c.T = total.duration();
  c.fingerprint = total.fingerprint + (background ? "+" + background->fingerprint : "");
  for (double tau : taus) {
    const LaplaceTrace t = laplace_transform_trace(total, tau);
    if (background) {
      const LaplaceTrace b = laplace_transform_trace(*background, tau);
      c.values.push_back(indicator_I(t, &b, src));
    } else {
      c.values.push_back(indicator_I(t, nullptr, src));
    }
  }
  return c;
}

IndicatorCurve indicator_tilde_curve(const TraceRecord& total, const TraceRecord* background,
                                     const MediumModel& medium, const SourceSpec& src,
                                     const std::vector<double>& taus) {
  IndicatorCurve c;
  c.taus = taus;
  c.variant = "I_tilde";
  c.T = total.duration();
  c.fingerprint = total.fingerprint + (background ? "+" + background->fingerprint : "");
  for (double tau : taus) {
    const LaplaceTrace t = laplace_transform_trace(total, tau);
    if (background) {
      const LaplaceTrace b = laplace_transform_trace(*background, tau);
      c.values.push_back(indicator_I_tilde(t, &b, medium, src));
    } else {
      c.values.push_back(indicator_I_tilde(t, nullptr, medium, src));
    }
  }
  return c;
}

std::vector<double> default_tau_grid(double dist_guess, const BackgroundMedium& bg, int count, double span) {
  if (!(dist_guess > 0.0)) fail(ErrorKind::config, "distance guess must be positive");
  if (count < 2 || !(span > 1.0)) fail(ErrorKind::config, "tau grid needs count >= 2 and span > 1");
  const double tau_max = 25.0 / (2.0 * std::sqrt(bg.mu0 * bg.eps0) * dist_guess);
  const double tau_min = tau_max / span;
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i)
    t[i] = tau_min * std::pow(span, static_cast<double>(i) / (count - 1));
  t.back() = tau_max;
  return t;
}

IndicatorCurve indicator_bold(const IndicatorCurve& c1, const IndicatorCurve& c2, const Vec3& a1, const Vec3& a2) {
  if (norm(cross(a1, a2)) <= 1e-9 * norm(a1) * norm(a2))
    fail(ErrorKind::config, "bold indicator needs linearly independent directions");
  if (c1.taus != c2.taus || c1.values.size() != c2.values.size())
    fail(ErrorKind::incompatible, "bold indicator needs curves on the same tau grid");
  if (c1.T != c2.T) fail(ErrorKind::incompatible, "bold indicator needs curves with the same T");
  IndicatorCurve out;
  out.taus = c1.taus;
  out.variant = "I_bold";
  out.T = c1.T;
  out.fingerprint = c1.fingerprint + "|" + c2.fingerprint;
  for (std::size_t i = 0; i < c1.values.size(); ++i) out.values.push_back(c1.values[i] + c2.values[i]);
  return out;
}

double source_log_factor(const BackgroundMedium& bg, const SourceSpec& src, double tau) {
  const LaplaceParams lp = LaplaceParams::make(bg, tau);
  const double x = lp.k * src.eta;
  const double log_K = std::log(lp.mu0 * tau) + log_phi_xi(x) - 3.0 * std::log(lp.k);
  const double ft = std::abs(f_tilde(src, tau));
  return std::log(tau) + 2.0 * log_K + 2.0 * std::log(ft) - 2.0 * x;
}

namespace {

std::vector<double> least_squares(const std::vector<std::vector<double>>& cols, const std::vector<double>& y,
                                  double& rms) {
  const auto n = static_cast<Eigen::Index>(y.size()), m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd A(n, m);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    b(k) = y[k];
    for (Eigen::Index j = 0; j < m; ++j) A(k, j) = cols[j][k];
  }
  const auto qr = A.colPivHouseholderQr();
  if (qr.rank() < m) fail(ErrorKind::insufficient_data, "degenerate fit window");
  const Eigen::VectorXd beta = qr.solve(b);
  rms = std::sqrt((A * beta - b).squaredNorm() / static_cast<double>(n));
  return {beta.data(), beta.data() + m};
}

}  // namespace

DistanceEstimate extract_distance(const IndicatorCurve& curve, const BackgroundMedium& bg, const ExtractOptions& opt) {
  DistanceEstimate est;
  est.model = opt.model;
  const std::size_t n = curve.taus.size();
  if (curve.values.size() != n) fail(ErrorKind::incompatible, "curve has mismatched tau and value counts");
  for (std::size_t i = 0; i < n; ++i)
    est.slope_curve.push_back(curve.values[i].is_zero() ? -std::numeric_limits<double>::infinity()
                                                        : curve.values[i].log_abs / curve.taus[i]);

  std::size_t first = 0;
  while (first < n && (curve.values[first].is_zero() || !std::isfinite(curve.values[first].log_abs))) ++first;
  std::size_t last = first;
  while (last < n && !curve.values[last].is_zero() && std::isfinite(curve.values[last].log_abs)) ++last;
  const std::size_t run = last - first;
  if (run < opt.min_clean) {
    std::ostringstream os;
    os << "only " << run << " usable indicator samples (need " << opt.min_clean << ")";
    fail(ErrorKind::insufficient_data, os.str());
  }

  const bool compensate = opt.model == FitModel::compensated && opt.source.has_value();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = first; i < last; ++i)
    y[i] = curve.values[i].log_abs - (compensate ? source_log_factor(bg, *opt.source, curve.taus[i]) : 0.0);

  std::vector<double> local;
  for (std::size_t i = first; i + 1 < last; ++i)
    local.push_back((y[i + 1] - y[i]) / (curve.taus[i + 1] - curve.taus[i]));
  std::vector<double> head(local.begin(), local.begin() + std::max<std::size_t>(1, local.size() / 3));
  std::nth_element(head.begin(), head.begin() + head.size() / 2, head.end());
  const double median = head[head.size() / 2];
  if (!(median < 0.0))
    fail(ErrorKind::no_decay, "indicator does not decay in tau (T may be below 2 sqrt(mu0 eps0) dist(D,B))");

  std::size_t cut = last;
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (local[i] > 0.5 * median) {
      cut = first + i + 1;
      break;
    }
  }
  est.noise_floor_tau = cut < n ? curve.taus[cut] : std::numeric_limits<double>::infinity();
  est.n_clean = cut - first;
  if (est.n_clean < opt.min_clean) {
    std::ostringstream os;
    os << "only " << est.n_clean << " indicator samples before the noise floor at tau = "
       << est.noise_floor_tau << " (need " << opt.min_clean << ")";
    fail(ErrorKind::insufficient_data, os.str());
  }
  est.window_lo = curve.taus[first];
  est.window_hi = curve.taus[cut - 1];

  std::vector<std::vector<double>> cols;
  std::vector<double> tau_col, log_col, one_col, yy;
  for (std::size_t i = first; i < cut; ++i) {
    tau_col.push_back(curve.taus[i]);
    log_col.push_back(std::log(curve.taus[i]));
    one_col.push_back(1.0);
    yy.push_back(y[i]);
  }
  cols.push_back(tau_col);
  if (opt.model == FitModel::compensated) cols.push_back(log_col);
  cols.push_back(one_col);
  const std::vector<double> beta = least_squares(cols, yy, est.residual);
  est.slope = beta[0];
  est.power = opt.model == FitModel::compensated ? beta[1] : 0.0;
  est.intercept = beta.back();
  if (!(est.slope < 0.0))
    fail(ErrorKind::no_decay, "fitted indicator slope is non-negative (T may be below 2 sqrt(mu0 eps0) dist(D,B))");
  if (curve.T > 0.0) {
    // e^{tau T} I(tau) must grow when T exceeds the round trip; otherwise only truncation remains.
    std::vector<double> raw;
    for (std::size_t i = first; i < cut; ++i) raw.push_back(curve.values[i].log_abs);
    double raw_rms = 0.0;
    const double raw_slope = least_squares({tau_col, one_col}, raw, raw_rms)[0];
    if (raw_slope + curve.T <= 0.0) {
      std::ostringstream os;
      os << "e^{tau T} I(tau) does not grow on the clean window (raw decay rate " << -raw_slope
         << " >= T = " << curve.T << "); T may be below 2 sqrt(mu0 eps0) dist(D,B)";
      fail(ErrorKind::no_decay, os.str());
    }
  }
  est.dist_est = -est.slope / (2.0 * std::sqrt(bg.mu0 * bg.eps0));
  return est;
}

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::A_I_like: return "A_I_like";
    case SignClass::A_II_like: return "A_II_like";
    case SignClass::inconclusive: return "inconclusive";
  }
  return "?";
}

SignClass classify_by_sign(const IndicatorCurve& curve, double lo, double hi) {
  int seen = 0;
  bool neg = true, pos = true;
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    if (curve.taus[i] < lo || curve.taus[i] > hi) continue;
    ++seen;
    neg = neg && curve.values[i].sign < 0;
    pos = pos && curve.values[i].sign > 0;
  }
  if (seen == 0) return SignClass::inconclusive;
  if (neg) return SignClass::A_I_like;
  if (pos) return SignClass::A_II_like;
  return SignClass::inconclusive;
}

SignClass classify_by_sign(const IndicatorCurve& curve, const DistanceEstimate& est) {
  return classify_by_sign(curve, est.window_lo, est.window_hi);
}

TheoremBounds theorem11_bounds(const LaplaceParams& lp, const SourceSpec& src, const ObstacleSpec& obstacle,
                               const BackgroundMedium& bg, const ShellQuadOptions& quad) {
  if (!obstacle.piecewise_constant())
    fail(ErrorKind::invalid_material, "theorem bounds need a piecewise-constant obstacle");
  const double e0 = lp.eps0_t;
  const double e = bg.eps0 * obstacle.eps_r({}) + (bg.sigma0 + obstacle.h_pert({})) / lp.tau;
  const double mu0 = bg.mu0;
  const double mu = bg.mu0 * obstacle.mu_r({});

  const double ft = f_tilde(src, lp.tau);
  const double log_K = std::log(lp.mu0 * lp.tau) + log_phi_xi(lp.k * src.eta) - 3.0 * std::log(lp.k);
  auto hat = [&](bool magnetic) {
    return shell_integral(
        obstacle.shape, src.p, 2.0 * lp.k,
        [&](double r, const Vec3& n) {
          const Lemma31Norms nn = lemma31_norms(lp, src, src.p + n * r);
          return (magnetic ? nn.vm2_hat : nn.ve2_hat) / (r * r);
        },
        quad);
  };
  const ShellIntegral ie = hat(false), im = hat(true);
  const double scale_log = 2.0 * log_K + 2.0 * std::log(std::abs(ft));
  TheoremBounds b;
  b.ve_integral = ie.value * std::exp(scale_log + ie.log_offset);
  b.vm_integral = im.value * std::exp(scale_log + im.log_offset);
  const double t = lp.tau;
  b.upper = t * ((e0 / e) * (e0 - e) * b.ve_integral + (mu - mu0) * b.vm_integral);
  b.lower = t * ((e0 - e) * b.ve_integral + (mu0 / mu) * (mu - mu0) * b.vm_integral);
  b.gap = t * ((e0 - e) * (e0 - e) / e * b.ve_integral + (mu - mu0) * (mu - mu0) / mu * b.vm_integral);
  return b;
}

SandwichReport theorem11_sandwich(const IndicatorCurve& curve, const DistanceEstimate& est, const SourceSpec& src,
                                  const ObstacleSpec& obstacle, const BackgroundMedium& bg, std::size_t n_check,
                                  const ShellQuadOptions& quad) {
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < curve.taus.size(); ++i)
    if (curve.taus[i] >= est.window_lo && curve.taus[i] <= est.window_hi) window.push_back(i);
  if (window.size() < n_check) fail(ErrorKind::insufficient_data, "clean window shorter than the sandwich check");

  SandwichReport rep;
  rep.ordered = true;
  auto budget = [&](double tau) { return std::pow(tau, -2.5) * std::exp(-tau * curve.T); };
  std::vector<SandwichPoint> pts;
  for (std::size_t i : window) {
    const double tau = curve.taus[i];
    const TheoremBounds b = theorem11_bounds(LaplaceParams::make(bg, tau), src, obstacle, bg, quad);
    SandwichPoint p;
    p.tau = tau;
    p.I = curve.values[i].to_double();
    p.lower = b.lower;
    p.upper = b.upper;
    rep.ordered = rep.ordered && b.upper >= b.lower;
    pts.push_back(p);
  }
  const std::size_t split = pts.size() - n_check;
  for (std::size_t j = 0; j < split; ++j) {
    const double excess = std::max({0.0, pts[j].lower - pts[j].I, pts[j].I - pts[j].upper});
    rep.slack_coef = std::max(rep.slack_coef, excess / budget(pts[j].tau));
  }
  rep.all_inside = true;
  for (std::size_t j = split; j < pts.size(); ++j) {
    SandwichPoint p = pts[j];
    p.slack = rep.slack_coef * budget(p.tau);
    p.inside = p.I >= p.lower - p.slack && p.I <= p.upper + p.slack;
    rep.all_inside = rep.all_inside && p.inside;
    rep.points.push_back(p);
  }
  return rep;
}

void write_curve_csv(std::ostream& os, const IndicatorCurve& c) {
  os << "# fingerprint=" << c.fingerprint << "\n";
  os << "# T=" << std::setprecision(17) << c.T << "\n";
  os << "tau,sign,log_abs_I,I_over_exp,variant\n";
  for (std::size_t i = 0; i < c.taus.size(); ++i) {
    const LogValue& v = c.values[i];
    os << std::setprecision(17) << c.taus[i] << "," << v.sign << ",";
    if (v.is_zero())
      os << "-inf,";
    else
      os << v.log_abs << ",";
    const double scaled = v.log_abs + c.taus[i] * c.T;
    if (!v.is_zero() && std::abs(scaled) < 700.0) os << v.sign * std::exp(scaled);
    os << "," << c.variant << "\n";
  }
}

IndicatorCurve read_curve_csv(std::istream& is) {
  IndicatorCurve c;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
      if (key == "fingerprint") c.fingerprint = val;
      if (key == "T") c.T = std::stod(val);
      continue;
    }
    if (!header) {
      if (line.rfind("tau,sign,log_abs_I", 0) != 0) fail(ErrorKind::io, "not an indicator curve CSV");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() < 3) fail(ErrorKind::io, "malformed indicator curve row: " + line);
    c.taus.push_back(std::stod(f[0]));
    const int sign = std::stoi(f[1]);
    c.values.push_back(sign == 0 ? LogValue{} : LogValue::from_log(std::stod(f[2]), sign));
    if (f.size() >= 5) c.variant = f[4];
  }
  if (!header) fail(ErrorKind::io, "indicator curve CSV has no header");
  return c;
}

std::string distance_json(const DistanceEstimate& e) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["dist_est"] = num(e.dist_est);
  j["slope"] = num(e.slope);
  j["intercept"] = num(e.intercept);
  j["power"] = num(e.power);
  j["window"] = {num(e.window_lo), num(e.window_hi)};
  j["residual"] = num(e.residual);
  j["noise_floor_tau"] = num(e.noise_floor_tau);
  j["n_clean"] = e.n_clean;
  j["model"] = e.model == FitModel::compensated ? "compensated" : "exponential";
  return j.dump(2);
}

}  // namespace emenc
