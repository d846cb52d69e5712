#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "emenc/error.hpp"
#include "emenc/indicator.hpp"
#include "emenc/laplace.hpp"

using namespace emenc;

namespace {

TraceRecord make_trace(std::size_t n_points, std::size_t samples, double dt,
                       const std::function<Vec3(std::size_t, double)>& e,
                       TraceMode mode = TraceMode::scattered) {
  TraceRecord tr;
  for (std::size_t q = 0; q < n_points; ++q) {
    tr.points.push_back({0.01 * static_cast<double>(q), 0.0, 0.0});
    tr.weights.push_back(1e-4 * static_cast<double>(q + 1));
  }
  tr.dt = dt;
  tr.samples = samples;
  tr.mode = mode;
  tr.fingerprint = "test";
  for (std::size_t n = 0; n < samples; ++n)
    for (std::size_t q = 0; q < n_points; ++q) {
      const Vec3 v = e(q, dt * static_cast<double>(n));
      tr.data.insert(tr.data.end(), {v.x, v.y, v.z});
    }
  return tr;
}

IndicatorCurve synthetic_curve(const std::vector<double>& taus, const std::function<double(double)>& log_abs,
                               int sign = -1, double T = 10.0) {
  IndicatorCurve c;
  c.taus = taus;
  c.T = T;
  for (double t : taus) c.values.push_back(LogValue::from_log(log_abs(t), sign));
  return c;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return v;
}

SourceSpec unit_source() {
  SourceSpec s;
  s.p = {0, 0, 0};
  s.eta = 0.05;
  s.a = {0, 0, 1};
  s.pulse = PulseSpec::linear_ramp(0.5);
  s.T = 2.0;
  return s;
}

}  // namespace

TEST_CASE("laplace transform of a constant trace has the closed form") {
  const double T = 1.5, tau = 3.7;
  auto tr = make_trace(3, 301, T / 300, [](std::size_t q, double) { return Vec3{1.0 + q, -2.0, 0.5}; });
  const LaplaceTrace lt = laplace_transform_trace(tr, tau);
  const double base = -std::expm1(-tau * T) / tau;
  for (std::size_t q = 0; q < 3; ++q) {
    CHECK(lt.W[q].x == doctest::Approx((1.0 + q) * base).epsilon(1e-13));
    CHECK(lt.W[q].y == doctest::Approx(-2.0 * base).epsilon(1e-13));
    CHECK(lt.W[q].z == doctest::Approx(0.5 * base).epsilon(1e-13));
  }
}

TEST_CASE("laplace transform of a zero trace is zero and of a linear trace matches the ramp") {
  const double T = 1.0, tau = 5.0;
  auto zero = make_trace(2, 11, 0.1, [](std::size_t, double) { return Vec3{}; });
  for (const Vec3& w : laplace_transform_trace(zero, tau).W) CHECK(norm(w) == 0.0);

  auto lin = make_trace(1, 201, T / 200, [](std::size_t, double t) { return Vec3{t, 0, 0}; });
  PulseSpec ramp;
  ramp.k = 1;
  ramp.t_rise = std::numeric_limits<double>::infinity();
  CHECK(laplace_transform_trace(lin, tau).W[0].x == doctest::Approx(laplace_pulse(ramp, T, tau)).epsilon(1e-12));
}

TEST_CASE("indicator of identical total and background traces vanishes") {
  auto e = [](std::size_t q, double t) { return Vec3{std::sin(3 * t), q * t, t * t}; };
  auto total = make_trace(4, 101, 0.01, e, TraceMode::total_with_obstacle);
  auto bg = make_trace(4, 101, 0.01, e, TraceMode::background);
  const SourceSpec src = unit_source();
  const LaplaceTrace lt = laplace_transform_trace(total, 4.0), lb = laplace_transform_trace(bg, 4.0);
  CHECK(indicator_I(lt, &lb, src).is_zero());
}

TEST_CASE("indicator checks trace compatibility") {
  const SourceSpec src = unit_source();
  auto e = [](std::size_t, double t) { return Vec3{0, 0, t}; };
  auto total = make_trace(4, 101, 0.01, e, TraceMode::total_with_obstacle);
  auto bg = make_trace(3, 101, 0.01, e, TraceMode::background);
  const LaplaceTrace lt = laplace_transform_trace(total, 4.0), lb = laplace_transform_trace(bg, 4.0);
  CHECK_THROWS_AS(indicator_I(lt, &lb, src), Error);
  CHECK_THROWS_AS(indicator_I(lt, nullptr, src), Error);
  const LaplaceTrace lb2 = laplace_transform_trace(make_trace(4, 101, 0.01, e, TraceMode::background), 5.0);
  try {
    indicator_I(lt, &lb2, src);
    FAIL("expected incompatible");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::incompatible);
  }
}

TEST_CASE("scattered indicator equals the weighted projection and scales quadratically") {
  SourceSpec src = unit_source();
  auto e = [](std::size_t q, double t) { return Vec3{1.0, 2.0, -t * (1.0 + q)}; };
  auto sc = make_trace(3, 401, 0.005, e);
  const double tau = 6.0;
  const LaplaceTrace lt = laplace_transform_trace(sc, tau);
  double expect = 0.0;
  for (std::size_t q = 0; q < 3; ++q) expect += sc.weights[q] * lt.W[q].z;
  expect *= laplace_pulse(src.pulse, src.T, tau);
  const LogValue I = indicator_I(lt, nullptr, src);
  CHECK(I.sign == -1);
  CHECK(I.to_double() == doctest::Approx(expect).epsilon(1e-13));

  // doubling the pulse doubles f~ and (through linearity of the solver) the field
  SourceSpec src2 = src;
  src2.pulse.amplitude *= 2.0;
  auto sc2 = make_trace(3, 401, 0.005, [&](std::size_t q, double t) { return e(q, t) * 2.0; });
  const LogValue I2 = indicator_I(laplace_transform_trace(sc2, tau), nullptr, src2);
  CHECK(I2.log_abs - I.log_abs == doctest::Approx(std::log(4.0)).epsilon(1e-13));
}

TEST_CASE("I_tilde refuses a non-constant background medium") {
  SourceSpec src = unit_source();
  auto sc = make_trace(2, 11, 0.1, [](std::size_t, double) { return Vec3{}; });
  const LaplaceTrace lt = laplace_transform_trace(sc, 3.0);
  MediumModel m;
  m.background_field = [](const Vec3&) { return MaterialSample{}; };
  CHECK_THROWS_AS(indicator_I_tilde(lt, &lt, m, src), Error);
}

TEST_CASE("exact exponential curve gives the distance to 1e-10") {
  BackgroundMedium bg;
  const auto taus = log_grid(2.0, 25.0, 16);
  const auto c = synthetic_curve(taus, [](double t) { return -2.0 * t * 0.5; });
  for (auto model : {FitModel::exponential, FitModel::compensated}) {
    ExtractOptions o;
    o.model = model;
    const DistanceEstimate e = extract_distance(c, bg, o);
    CHECK(e.dist_est == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(e.n_clean == 16);
    CHECK(std::isinf(e.noise_floor_tau));
  }
  bg.eps0 = 4.0;
  CHECK(extract_distance(c, bg).dist_est == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("noise floor is cut from the fit window") {
  BackgroundMedium bg;
  const auto taus = log_grid(1.0, 40.0, 24);
  const double floor_log = -40.0;
  const auto c = synthetic_curve(taus, [&](double t) { return std::max(-2.0 * 0.7 * t, floor_log + 1e-3 * t); });
  ExtractOptions o;
  o.model = FitModel::exponential;
  const DistanceEstimate e = extract_distance(c, bg, o);
  // the floor starts between grid points; at most one floor sample enters the window
  CHECK(e.dist_est == doctest::Approx(0.7).epsilon(1e-2));
  CHECK(e.window_hi < 30.0);
  CHECK(e.n_clean < 24);
  CHECK(e.noise_floor_tau > e.window_hi);
}

TEST_CASE("extract_distance error cases") {
  BackgroundMedium bg;
  auto kind_of = [&](const IndicatorCurve& c) {
    try {
      extract_distance(c, bg);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::config;
  };
  CHECK(kind_of(synthetic_curve(log_grid(1, 10, 7), [](double t) { return -t; })) == ErrorKind::insufficient_data);
  CHECK(kind_of(synthetic_curve(log_grid(1, 10, 12), [](double t) { return 0.3 * t; })) == ErrorKind::no_decay);
  // e^{tau T} I(tau) decays: T below the round trip
  CHECK(kind_of(synthetic_curve(log_grid(1, 10, 12), [](double t) { return -1.4 * t; }, -1, 1.0)) ==
        ErrorKind::no_decay);
  // zeros end the usable run
  auto c = synthetic_curve(log_grid(1, 10, 12), [](double t) { return -t; });
  c.values[5] = LogValue{};
  CHECK(kind_of(c) == ErrorKind::insufficient_data);
}

TEST_CASE("compensated fit removes the known source factor") {
  BackgroundMedium bg;
  SourceSpec src = unit_source();
  src.T = 8.0;
  const auto taus = log_grid(2.0, 18.0, 16);
  const auto c = synthetic_curve(taus, [&](double t) {
    return source_log_factor(bg, src, t) - 2.0 * 0.7 * t - 2.0 * std::log(t) + 1.5;
  });
  ExtractOptions o;
  o.source = src;
  const DistanceEstimate e = extract_distance(c, bg, o);
  CHECK(e.dist_est == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(e.power == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(e.residual < 1e-9);
}

TEST_CASE("sign classification") {
  const auto taus = log_grid(1, 10, 10);
  auto neg = synthetic_curve(taus, [](double t) { return -t; }, -1);
  auto pos = synthetic_curve(taus, [](double t) { return -t; }, +1);
  CHECK(classify_by_sign(neg, 1, 10) == SignClass::A_I_like);
  CHECK(classify_by_sign(pos, 1, 10) == SignClass::A_II_like);
  pos.values[3] = -pos.values[3];
  CHECK(classify_by_sign(pos, 1, 10) == SignClass::inconclusive);
  CHECK(classify_by_sign(pos, taus[4], 10) == SignClass::A_II_like);
  auto zero = neg;
  for (auto& v : zero.values) v = LogValue{};
  CHECK(classify_by_sign(zero, 1, 10) == SignClass::inconclusive);
}

TEST_CASE("bold indicator of two equal curves is shifted by log 2") {
  const auto taus = log_grid(1, 10, 10);
  auto c = synthetic_curve(taus, [](double t) { return -1.3 * t + 0.2; });
  const IndicatorCurve b = indicator_bold(c, c, {1, 0, 0}, {0, 1, 0});
  CHECK(b.variant == "I_bold");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    CHECK(b.values[i].sign == -1);
    CHECK(b.values[i].log_abs - c.values[i].log_abs == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  BackgroundMedium bg;
  CHECK(extract_distance(b, bg).dist_est == doctest::Approx(extract_distance(c, bg).dist_est).epsilon(1e-10));

  CHECK_THROWS_AS(indicator_bold(c, c, {1, 0, 0}, {-2, 0, 0}), Error);
  auto c2 = synthetic_curve(log_grid(1, 11, 10), [](double t) { return -t; });
  CHECK_THROWS_AS(indicator_bold(c, c2, {1, 0, 0}, {0, 1, 0}), Error);
}

TEST_CASE("default tau grid reaches 2 d tau_max = 25") {
  BackgroundMedium bg;
  const auto g = default_tau_grid(0.7, bg);
  REQUIRE(g.size() == 16);
  CHECK(2.0 * 0.7 * g.back() == doctest::Approx(25.0));
  CHECK(g.back() / g.front() == doctest::Approx(8.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("upper and lower contrast weights satisfy the ordering identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double e0 = u(rng), e = u(rng);
    const double lhs = (e0 - e) + (e0 - e) * (e0 - e) / e;
    const double rhs = (e0 / e) * (e0 - e);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
    CHECK(rhs >= e0 - e);
  }
}

TEST_CASE("theorem bounds: ordering, vanishing contrast and an independent volume integral") {
  BackgroundMedium bg;
  SourceSpec src = unit_source();
  const Sphere sph{{0.6, 0.1, 0.0}, 0.2};
  const LaplaceParams lp = LaplaceParams::make(bg, 2.0);

  const TheoremBounds zero = theorem11_bounds(lp, src, ObstacleSpec{Shape(sph), 0.0, 0.0, 0.0}, bg);
  CHECK(zero.upper == 0.0);
  CHECK(zero.lower == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 3.0);
  for (int i = 0; i < 6; ++i) {
    const ObstacleSpec ob{Shape(sph), u(rng), u(rng), 0.0};
    const TheoremBounds b = theorem11_bounds(lp, src, ob, bg);
    CHECK(b.upper >= b.lower);
    CHECK(b.gap >= 0.0);
    CHECK(b.upper - b.lower == doctest::Approx(b.gap).epsilon(1e-12));
  }

  // integral of |Ve0|^2 over the ball by a product Gauss rule in the ball's own coordinates
  const GaussRule& g = gauss_legendre(48);
  double ref = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double rho = sph.radius * 0.5 * (g.x[i] + 1.0);
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      const double ct = g.x[j];
      const double st = std::sqrt(1.0 - ct * ct);
      for (std::size_t k = 0; k < g.x.size(); ++k) {
        const double ph = M_PI * (g.x[k] + 1.0);
        const Vec3 x = sph.center + Vec3{st * std::cos(ph), st * std::sin(ph), ct} * rho;
        const Vec3 ve = eval_V0_fields(lp, src, x).Ve;
        ref += g.w[i] * g.w[j] * g.w[k] * dot(ve, ve) * rho * rho * 0.5 * sph.radius * M_PI;
      }
    }
  }
  const ObstacleSpec ob{Shape(sph), 2.0, 0.0, 0.0};
  const TheoremBounds b = theorem11_bounds(lp, src, ob, bg);
  CHECK(b.ve_integral == doctest::Approx(ref).epsilon(1e-7));
  CHECK(b.upper == doctest::Approx(lp.tau * (1.0 / 3.0) * (1.0 - 3.0) * ref).epsilon(1e-7));
  CHECK(b.lower == doctest::Approx(lp.tau * (1.0 - 3.0) * ref).epsilon(1e-7));
}

TEST_CASE("curve CSV and distance JSON round trip") {
  auto c = synthetic_curve(log_grid(1, 10, 10), [](double t) { return -1.1 * t + 0.3; });
  c.values[2] = LogValue{};
  c.fingerprint = "abc123";
  c.variant = "I_tilde";
  c.T = 3.0;
  std::stringstream ss;
  write_curve_csv(ss, c);
  const IndicatorCurve r = read_curve_csv(ss);
  CHECK(r.fingerprint == "abc123");
  CHECK(r.variant == "I_tilde");
  CHECK(r.T == 3.0);
  REQUIRE(r.taus.size() == c.taus.size());
  for (std::size_t i = 0; i < c.taus.size(); ++i) {
    CHECK(r.taus[i] == c.taus[i]);
    CHECK(r.values[i].sign == c.values[i].sign);
    if (!c.values[i].is_zero()) CHECK(r.values[i].log_abs == c.values[i].log_abs);
  }

  BackgroundMedium bg;
  auto good = synthetic_curve(log_grid(1, 10, 10), [](double t) { return -t; });
  const DistanceEstimate e = extract_distance(good, bg);
  const auto j = nlohmann::json::parse(distance_json(e));
  CHECK(j.at("dist_est").get<double>() == e.dist_est);
  CHECK(j.at("window").size() == 2);
  CHECK(j.at("noise_floor_tau").is_null());
}
