#include "commands.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "emenc/asymptotics.hpp"
#include "emenc/error.hpp"
#include "emenc/fdtd/io.hpp"
#include "emenc/fdtd/run.hpp"
#include "emenc/indicator.hpp"
#include "emenc/reflector.hpp"
#include "oracles.hpp"

namespace emenc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot write " + path.string());
  f << text;
  if (!f) fail(ErrorKind::io, "write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path, ErrorKind missing) {
  std::ifstream f(path);
  if (!f) fail(missing, "missing " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorKind::io, "malformed " + path.string() + ": " + e.what());
  }
}

void write_curve(const fs::path& path, const IndicatorCurve& c) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot write " + path.string());
  write_curve_csv(f, c);
}

IndicatorCurve read_curve(const std::string& path) {
  if (path == "-") return read_curve_csv(std::cin);
  std::ifstream f(path);
  if (!f) fail(ErrorKind::staleness, "missing curve file " + path + " (run indicator first)");
  return read_curve_csv(f);
}

std::string trace_name(std::size_t dir, const std::string& role) {
  return "trace_d" + std::to_string(dir) + "_" + role + ".emtrace";
}

MediumModel model_of(const ExperimentConfig& cfg) { return MediumModel{cfg.medium, cfg.obstacle, {}}; }

std::string resolved_run_fingerprint(const ExperimentConfig& cfg, const SourceSpec& src) {
  GridSpec g = cfg.grid;
  g.threads = 1;
  const MediumModel m = model_of(cfg);
  prepare_grid(m, src, g);
  return run_fingerprint(m, src, g);
}

fs::path out_dir(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

}  // namespace

ExperimentConfig load(const Options& opt) {
  ExperimentConfig cfg = make_config(load_config_file(opt.config));
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (!opt.mode.empty()) cfg.mode = run_mode_from_string(opt.mode);
  if (opt.threads) {
    if (*opt.threads < 1) fail(ErrorKind::config, "--threads must be >= 1");
    cfg.grid.threads = *opt.threads;
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.tau_min) cfg.tau.tau_min = opt.tau_min;
  if (opt.tau_max) cfg.tau.tau_max = opt.tau_max;
  if (opt.tau_count) cfg.tau.count = *opt.tau_count;
  return cfg;
}

std::string cache_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("EM_ENCLOSURE_CACHE"); env && *env) return env;
  return (fs::path(cfg.output_dir) / "cache").string();
}

void write_schema(const std::string& dir) {
  json s;
  s["indicator_curve_csv"] = {
      {"files", {"curve_I_d<j>.csv", "curve_I_bold.csv", "curve_I_tilde_d<j>.csv"}},
      {"comments", {"# fingerprint=<config fingerprint>", "# T=<record duration>"}},
      {"columns",
       {{{"name", "tau"}, {"description", "Laplace parameter"}},
        {{"name", "sign"}, {"description", "sign of I(tau): -1, 0 or 1"}},
        {{"name", "log_abs_I"}, {"description", "log |I(tau)|; empty when sign is 0"}},
        {{"name", "I_over_exp"}, {"description", "e^{tau T} I(tau) when representable, else empty"}},
        {{"name", "variant"}, {"description", "I, I_tilde or I_bold"}}}}};
  s["tilde_delta_csv"] = {
      {"files", {"tilde_delta_d<j>.csv"}},
      {"columns",
       {{{"name", "tau"}, {"description", "Laplace parameter"}},
        {{"name", "log_abs_I"}, {"description", "log |I(tau)| from the recorded background"}},
        {{"name", "log_abs_I_tilde"}, {"description", "log |I~(tau)| from the analytic background"}},
        {{"name", "rel_delta"}, {"description", "|I~ - I| / |I|"}}}}};
  s["scaling_csv"] = {
      {"files", {"scaling.csv"}},
      {"columns",
       {{{"name", "tau"}, {"description", "Laplace parameter"}},
        {{"name", "log_value"}, {"description", "log |J(tau)|"}},
        {{"name", "sign"}, {"description", "sign of J(tau)"}},
        {{"name", "quantity"}, {"description", "J_full, J_perp, lemma32_upper_combo or lemma32_lower_combo"}}}}};
  json keys = json::object();
  for (const auto& [k, d] : config_keys()) keys[k] = d;
  s["config_keys"] = keys;
  fs::create_directories(dir);
  write_json(fs::path(dir) / "schema.json", s);
}

int cmd_simulate(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  validate_config(cfg);
  const fs::path out = out_dir(cfg);
  write_schema(out.string());

  json man;
  man["config_fingerprint"] = cfg.fingerprint();
  man["mode"] = to_string(cfg.mode);
  man["seed"] = cfg.seed;
  man["T"] = cfg.source.T;
  man["directions"] = json::array();
  for (const Vec3& a : cfg.directions) man["directions"].push_back(vec_json(a));
  man["traces"] = json::array();
  man["stores"] = json::array();

  auto record = [&](std::size_t j, const std::string& role, const TraceRecord& tr) {
    const std::string name = trace_name(j, role);
    write_trace((out / name).string(), tr);
    man["traces"].push_back({{"direction", j}, {"role", role}, {"path", name}, {"fingerprint", tr.fingerprint}});
    std::cout << "wrote " << (out / name).string() << "\n";
  };

  for (std::size_t j = 0; j < cfg.directions.size(); ++j) {
    const SourceSpec src = cfg.source_for(j);
    if (!cfg.obstacle) {
      record(j, "background", run_simulation(cfg.medium, std::nullopt, src, cfg.grid));
      continue;
    }
    if (cfg.mode == RunMode::total_pair) {
      record(j, "background", run_simulation(cfg.medium, std::nullopt, src, cfg.grid));
      record(j, "total", run_simulation(cfg.medium, cfg.obstacle, src, cfg.grid));
      continue;
    }
    // scattered and analytic_tilde: scattered trace plus the background trace of the same run
    std::string store;
    if (cfg.store_background) {
      const fs::path dir = cache_dir(cfg);
      fs::create_directories(dir);
      store = (dir / ("bgvol_" + resolved_run_fingerprint(cfg, src) + ".embg")).string();
    }
    const fs::path bg_cache = store.empty() ? fs::path() : fs::path(store).replace_extension(".emtrace");
    std::optional<ScatteredRun> run;
    if (!store.empty() && fs::exists(store) && fs::exists(bg_cache)) {
      try {
        StoredBackground replay(store);
        ScatteredRun r;
        r.scattered = run_scattered(cfg.medium, *cfg.obstacle, src, cfg.grid, replay);
        r.background = read_trace(bg_cache.string());
        run = std::move(r);
        std::cout << "replayed background store " << store << "\n";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::dependency && e.kind() != ErrorKind::io) throw;
        std::cerr << "background store unusable, recomputing: " << e.what() << "\n";
      }
    }
    if (!run) {
      run = run_scattered_lockstep(cfg.medium, *cfg.obstacle, src, cfg.grid, store);
      if (!store.empty()) write_trace(bg_cache.string(), run->background);
    }
    if (!store.empty()) man["stores"].push_back({{"direction", j}, {"path", store}});
    record(j, "background", run->background);
    record(j, "scattered", run->scattered);
  }
  write_json(out / "manifest.json", man);
  std::cout << "config fingerprint " << cfg.fingerprint() << "\n";
  return 0;
}

namespace {

struct LoadedRun {
  std::optional<TraceRecord> background, total, scattered;
};

LoadedRun load_run(const fs::path& out, const json& man, std::size_t j) {
  LoadedRun r;
  for (const auto& t : man.at("traces")) {
    if (t.at("direction").get<std::size_t>() != j) continue;
    const fs::path path = out / t.at("path").get<std::string>();
    if (!fs::exists(path)) fail(ErrorKind::staleness, "missing trace " + path.string() + " (rerun simulate)");
    TraceRecord tr = read_trace(path.string());
    if (tr.fingerprint != t.at("fingerprint").get<std::string>())
      fail(ErrorKind::staleness, "trace " + path.string() + " does not match the manifest (rerun simulate)");
    const std::string role = t.at("role");
    if (role == "background") r.background = std::move(tr);
    if (role == "total") r.total = std::move(tr);
    if (role == "scattered") r.scattered = std::move(tr);
  }
  return r;
}

json load_manifest(const ExperimentConfig& cfg, const fs::path& out) {
  const json man = read_json(out / "manifest.json", ErrorKind::staleness);
  if (man.at("config_fingerprint").get<std::string>() != cfg.fingerprint())
    fail(ErrorKind::staleness, "traces in " + out.string() + " were simulated from a different config (rerun simulate)");
  if (man.at("mode").get<std::string>() != to_string(cfg.mode))
    fail(ErrorKind::staleness, "traces were simulated in mode " + man.at("mode").get<std::string>());
  return man;
}

}  // namespace

int cmd_indicator(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  if (!cfg.obstacle) fail(ErrorKind::config, "indicator curves need an obstacle in the config");
  const fs::path out = cfg.output_dir;
  const json man = load_manifest(cfg, out);
  write_schema(out.string());
  const std::vector<double> taus = cfg.tau_grid();
  const std::string fp = cfg.fingerprint();

  std::vector<IndicatorCurve> curves;
  for (std::size_t j = 0; j < cfg.directions.size(); ++j) {
    const SourceSpec src = cfg.source_for(j);
    const LoadedRun run = load_run(out, man, j);
    IndicatorCurve c;
    if (cfg.mode == RunMode::total_pair) {
      if (!run.total || !run.background) fail(ErrorKind::staleness, "total_pair mode needs total and background traces");
      c = indicator_curve(*run.total, &*run.background, src, taus);
    } else {
      if (!run.scattered) fail(ErrorKind::staleness, "missing scattered trace (rerun simulate)");
      c = indicator_curve(*run.scattered, nullptr, src, taus);
    }
    c.fingerprint = fp;
    const std::string name = "curve_I_d" + std::to_string(j) + ".csv";
    write_curve(out / name, c);
    std::cout << "wrote " << (out / name).string() << "\n";

    if (cfg.mode == RunMode::analytic_tilde) {
      IndicatorCurve t = indicator_tilde_curve(*run.scattered, &*run.background, MediumModel{cfg.medium, {}, {}}, src, taus);
      t.fingerprint = fp;
      const std::string tname = "curve_I_tilde_d" + std::to_string(j) + ".csv";
      write_curve(out / tname, t);
      std::ofstream d(out / ("tilde_delta_d" + std::to_string(j) + ".csv"));
      d << "tau,log_abs_I,log_abs_I_tilde,rel_delta\n";
      d.precision(17);
      for (std::size_t i = 0; i < taus.size(); ++i) {
        const LogValue diff = t.values[i] - c.values[i];
        d << taus[i] << "," << c.values[i].log_abs << "," << t.values[i].log_abs << ","
          << (c.values[i].is_zero() ? std::nan("") : std::exp(diff.log_abs - c.values[i].log_abs)) << "\n";
      }
      std::cout << "wrote " << (out / tname).string() << "\n";
    }
    curves.push_back(std::move(c));
  }
  if (curves.size() == 2) {
    IndicatorCurve b = indicator_bold(curves[0], curves[1], cfg.directions[0], cfg.directions[1]);
    b.fingerprint = fp;
    write_curve(out / "curve_I_bold.csv", b);
    std::cout << "wrote " << (out / "curve_I_bold.csv").string() << "\n";
  }
  return 0;
}

int cmd_extract(const Options& opt) {
  std::optional<ExperimentConfig> cfg;
  if (!opt.config.empty()) cfg = load(opt);
  std::vector<std::string> files = opt.curves;
  const fs::path out = cfg ? fs::path(cfg->output_dir) : fs::path(opt.out.empty() ? "out" : opt.out);
  if (files.empty()) {
    if (fs::exists(out / "curve_I_bold.csv"))
      files.push_back((out / "curve_I_bold.csv").string());
    else
      files.push_back((out / "curve_I_d0.csv").string());
  }
  const BackgroundMedium bg = cfg ? cfg->medium : BackgroundMedium{};

  json res;
  res["curves"] = json::array();
  if (cfg) {
    res["config_fingerprint"] = cfg->fingerprint();
    if (cfg->obstacle) {
      res["ground_truth"] = {
          {"dist_D_B", dist_D_B(cfg->obstacle->shape, cfg->source.p, cfg->source.eta)},
          {"material_class", to_string(classify_material(*cfg->obstacle, cfg->medium).cls)}};
    }
  }
  for (const std::string& f : files) {
    const IndicatorCurve c = read_curve(f);
    if (cfg && c.fingerprint != cfg->fingerprint())
      fail(ErrorKind::staleness, "curve " + f + " was produced from a different config (rerun indicator)");
    ExtractOptions o;
    if (cfg) {
      o.model = cfg->fit;
      o.source = cfg->source;
    }
    const DistanceEstimate est = extract_distance(c, bg, o);
    json e = json::parse(distance_json(est));
    e["file"] = f;
    e["variant"] = c.variant;
    e["class"] = to_string(classify_by_sign(c, est));
    res["curves"].push_back(e);
    std::cout << f << ": dist_est " << est.dist_est << " class " << e["class"].get<std::string>() << "\n";
  }
  if (cfg || !opt.out.empty()) {
    fs::create_directories(out);
    write_json(out / "results.json", res);
  }
  std::cout << res.dump(2) << "\n";
  return 0;
}

namespace {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<Check> run_checks(const ExperimentConfig& cfg, double interior_scale) {
  std::vector<Check> checks;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const BackgroundMedium& bg = cfg.medium;
  const SourceSpec& src = cfg.source;

  {  // closed-form norms against direct squared norms of the fields
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 dir = normalized(Vec3{u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5});
      const Vec3 x = src.p + dir * (src.eta * (1.05 + 20.0 * u01(rng)));
      for (int t = 0; t < 10; ++t) {
        const LaplaceParams lp = LaplaceParams::make(bg, 0.5 * std::pow(1.6, t));
        double ls = 0.0;
        const V0Fields f = eval_V0_fields_scaled(lp, src, x, ls);
        const Lemma31Norms n = lemma31_norms(lp, src, x);
        const double ve = dot(f.Ve, f.Ve), vm = dot(f.Vm, f.Vm);
        worst = std::max(worst, std::abs(ve - n.ve2_hat) / std::max(ve, 1e-300));
        if (vm > 0.0) worst = std::max(worst, std::abs(vm - n.vm2_hat) / vm);
      }
    }
    checks.push_back({"lemma31_norm_identities", worst, 1e-12, worst <= 1e-12, "1000 points x 10 tau"});
  }
  {  // sign equivalence of the two contrast conditions with the material classes
    std::uniform_real_distribution<double> u(0.05, 5.0);
    long bad = 0;
    for (int i = 0; i < 100000; ++i) {
      const double er = u(rng), mr = u(rng);
      const bool ai = (1.0 - 1.0 / er) + (1.0 - mr) > 0.0;
      const bool aii = (1.0 - er) + (1.0 - 1.0 / mr) > 0.0;
      const bool m315 = -lemma32_lhs_315(bg.eps0, bg.mu0, er * bg.eps0, mr * bg.mu0) > 0.0;
      const bool m317 = lemma32_lhs_317(bg.eps0, bg.mu0, er * bg.eps0, mr * bg.mu0) > 0.0;
      bad += (ai != m315) || (aii != m317);
    }
    checks.push_back({"lemma33_sign_equivalence", static_cast<double>(bad), 0.0, bad == 0, "1e5 random pairs"});
  }
  {  // interior ball potential against adaptive quadrature of the kernel
    double worst = 0.0, cont = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double k = LaplaceParams::make(bg, 0.5 + 30.0 * u01(rng)).k;
      const double r = src.eta * (0.02 + 0.96 * u01(rng));
      const RadialJet j = ball_potential(k, src.eta, r, interior_scale);
      const double f = oracle::yukawa_ball(k, src.eta, r);
      const double df = oracle::yukawa_ball_dr(k, src.eta, r);
      worst = std::max({worst, std::abs(j.f - f) / std::abs(f), std::abs(j.df - df) / std::max(std::abs(df), 1e-300)});
      const RadialJet in = ball_potential_branch(k, src.eta, src.eta, true, interior_scale);
      const RadialJet ex = ball_potential_branch(k, src.eta, src.eta, false);
      cont = std::max({cont, std::abs(in.f - ex.f) / std::abs(ex.f), std::abs(in.df - ex.df) / std::abs(ex.df)});
    }
    checks.push_back({"interior_potential_oracle", worst, 1e-6, worst <= 1e-6, "100 interior points"});
    checks.push_back({"potential_branch_continuity", cont, 1e-9, cont <= 1e-9, "r = eta"});
  }
  {  // ordering identity with the complex-frequency permittivity eps + sigma / tau
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double tau = 0.5 + 40.0 * u01(rng);
      const double e0 = bg.eps0 + bg.sigma0 / tau;
      const double e = (0.05 + 5.0 * u01(rng)) * bg.eps0 + 2.0 * u01(rng) / tau;
      const double lhs = (e0 - e) + (e0 - e) * (e0 - e) / e, rhs = (e0 / e) * (e0 - e);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    checks.push_back({"contrast_ordering_identity", worst, 1e-12, worst <= 1e-12, "1e4 random materials"});
  }
  {  // exact power-exponential law through the scaling fit
    std::vector<double> taus, logs;
    for (int i = 0; i < 12; ++i) {
      taus.push_back(std::pow(20.0, i / 11.0));
      logs.push_back(-2.0 * std::log(taus.back()) - 3.0 * taus.back());
    }
    const ScalingFit f = fit_scaling(taus, logs);
    const double err = std::max(std::abs(f.rate + 3.0), std::abs(f.power + 2.0));
    checks.push_back({"scaling_fit_synthetic", err, 1e-9, err <= 1e-9, "tau^-2 e^-3tau"});
  }
  if (cfg.obstacle && cfg.obstacle->piecewise_constant() && cfg.obstacle->shape.is_smooth()) {
    double worst = -1.0;
    for (double tau : {2.0, 8.0, 20.0}) {
      const TheoremBounds b = theorem11_bounds(LaplaceParams::make(bg, tau), src, *cfg.obstacle, bg);
      worst = std::max(worst, b.lower - b.upper);
    }
    checks.push_back({"theorem_bounds_ordered", worst, 0.0, worst <= 0.0, "upper - lower >= 0"});

    if (const auto* sph = std::get_if<Sphere>(&cfg.obstacle->shape.variant())) {
      const double rho = distance(sph->center, src.p);
      double worst = 0.0;
      for (double tau : {2.0, 10.0, 40.0}) {
        const double k = LaplaceParams::make(bg, tau).k;
        const LogValue j = energy_integral_D(Quantity::J_full, *cfg.obstacle, src, bg, tau);
        const double ref = std::log(oracle::ball_shell_scaled(rho, sph->radius, 2.0 * k, false)) -
                           2.0 * k * (rho - sph->radius);
        worst = std::max(worst, std::abs(j.log_abs - ref) / std::abs(ref));
      }
      checks.push_back({"shell_quadrature_oracle", worst, 1e-8, worst <= 1e-8, "J_full vs radial cap integral"});
    }
  }
  // sandwich against measured curves when indicator has been run for this config
  const fs::path curve = fs::path(cfg.output_dir) / "curve_I_d0.csv";
  if (cfg.obstacle && fs::exists(curve)) {
    const IndicatorCurve c = read_curve(curve.string());
    if (c.fingerprint == cfg.fingerprint()) {
      ExtractOptions o;
      o.model = cfg.fit;
      o.source = cfg.source;
      const DistanceEstimate est = extract_distance(c, bg, o);
      const SandwichReport s = theorem11_sandwich(c, est, cfg.source_for(0), *cfg.obstacle, bg);
      checks.push_back({"theorem_sandwich", s.slack_coef, 0.0, s.all_inside && s.ordered,
                        "three largest clean-window tau"});
    }
  }
  return checks;
}

}  // namespace

int cmd_verify(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  cfg.medium.validate();
  cfg.source.validate();
  const std::vector<Check> checks = run_checks(cfg, opt.interior_scale);
  json rep;
  rep["config_fingerprint"] = cfg.fingerprint();
  rep["checks"] = json::array();
  bool ok = true;
  for (const Check& c : checks) {
    rep["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}, {"note", c.note}});
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " tol=" << c.tolerance << "\n";
    ok = ok && c.pass;
  }
  rep["pass"] = ok;
  write_json(out_dir(cfg) / "verify.json", rep);
  return ok ? 0 : 1;
}

int cmd_scaling(const Options& opt) {
  ExperimentConfig cfg = load(opt);
  if (!cfg.obstacle) fail(ErrorKind::config, "scaling needs an obstacle in the config");
  cfg.obstacle->validate(cfg.medium);
  dist_D_B(cfg.obstacle->shape, cfg.source.p, cfg.source.eta);
  if (!opt.tau_min && !opt.tau_max && !cfg.tau.tau_min) {
    cfg.tau.tau_min = 10.0;
    cfg.tau.tau_max = 40.0;
  }
  const ScalingReport r =
      scaling_report(quantity_from_string(opt.quantity), *cfg.obstacle, cfg.source, cfg.medium, cfg.tau_grid());
  const fs::path out = out_dir(cfg);
  write_schema(out.string());
  std::ofstream f(out / "scaling.csv", std::ios::binary);
  write_scaling_csv(f, r);
  write_text(out / "scaling.json", scaling_json(r) + "\n");
  std::cout << to_string(r.quantity) << ": rate " << r.fit.rate << " (expected " << r.expected_rate << "), power "
            << r.fit.power << ", kappa " << r.kappa_expected << "\n";
  return 0;
}

int cmd_reflector(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  if (!cfg.obstacle) fail(ErrorKind::config, "reflector needs an obstacle in the config");
  const ReflectorReport r = first_reflector(cfg.obstacle->shape, cfg.source.p, cfg.source.a);
  json j;
  j["lambda"] = r.lambda;
  j["dist_pD"] = r.dist_pD;
  j["flags"] = {{"b1", r.flags.b1}, {"b2", r.flags.b2}, {"b3", r.flags.b3}};
  j["points"] = json::array();
  for (const ReflectorPoint& p : r.points)
    j["points"].push_back({{"q", vec_json(p.q)},
                           {"nu", vec_json(p.nu)},
                           {"gauss", p.gauss},
                           {"mean", p.mean},
                           {"det_diff", p.det_diff}});
  write_json(out_dir(cfg) / "reflector.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace emenc::cli
