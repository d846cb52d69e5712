#include "emenc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "emenc/error.hpp"
#include "emenc/fdtd/run.hpp"
#include "emenc/fingerprint.hpp"

namespace emenc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const ConfigMap& m) : m_(m) {}

  bool has(const std::string& k) const { return m_.count(k) != 0; }

  const std::string& str(const std::string& k) {
    used_.insert(k);
    return m_.at(k);
  }

  double num(const std::string& k, double def) {
    if (!has(k)) return def;
    return parse_num(k, str(k));
  }

  int integer(const std::string& k, int def) {
    const double v = num(k, def);
    if (v != std::floor(v)) fail(ErrorKind::config, "config key " + k + " must be an integer");
    return static_cast<int>(v);
  }

  Vec3 vec(const std::string& k, const Vec3& def) {
    if (!has(k)) return def;
    std::stringstream ss(str(k));
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) v.push_back(parse_num(k, trim(part)));
    if (v.size() != 3) fail(ErrorKind::config, "config key " + k + " needs three comma-separated numbers");
    return {v[0], v[1], v[2]};
  }

  std::string word(const std::string& k, const std::string& def) { return has(k) ? str(k) : def; }

  bool flag(const std::string& k, bool def) {
    if (!has(k)) return def;
    const std::string& v = str(k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorKind::config, "config key " + k + " must be true or false");
  }

  void reject_unused() const {
    for (const auto& [k, v] : m_)
      if (!used_.count(k)) fail(ErrorKind::config, "unknown config key: " + k);
  }

 private:
  static double parse_num(const std::string& k, const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) fail(ErrorKind::config, "config key " + k + ": not a number: " + s);
    return v;
  }

  const ConfigMap& m_;
  std::set<std::string> used_;
};

}  // namespace

ConfigMap parse_config(std::istream& is) {
  ConfigMap m;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::config, "line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::config, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::config, "line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (!m.emplace(key, value).second) fail(ErrorKind::config, "duplicate config key: " + key);
  }
  return m;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::io, "cannot open config " + path);
  return parse_config(f);
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::scattered: return "scattered";
    case RunMode::total_pair: return "total_pair";
    case RunMode::analytic_tilde: return "analytic_tilde";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "scattered") return RunMode::scattered;
  if (s == "total_pair") return RunMode::total_pair;
  if (s == "analytic_tilde") return RunMode::analytic_tilde;
  fail(ErrorKind::config, "unknown run mode: " + s);
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"medium.eps0", "background permittivity (default 1)"},
      {"medium.mu0", "background permeability (default 1)"},
      {"medium.sigma0", "background conductivity (default 0)"},
      {"obstacle.shape", "none | sphere | ellipsoid | box (default none)"},
      {"obstacle.center", "x,y,z (sphere, ellipsoid)"},
      {"obstacle.radius", "sphere radius"},
      {"obstacle.semi_axes", "a,b,c (ellipsoid, axis aligned)"},
      {"obstacle.lo", "x,y,z lower corner (box)"},
      {"obstacle.hi", "x,y,z upper corner (box)"},
      {"obstacle.eps_r", "relative permittivity on D (default 1)"},
      {"obstacle.mu_r", "relative permeability on D (default 1)"},
      {"obstacle.sigma", "conductivity perturbation on D (default 0)"},
      {"source.p", "ball centre x,y,z"},
      {"source.eta", "ball radius (default 0.05)"},
      {"source.a", "polarization x,y,z (normalized on load)"},
      {"source.a2", "optional second polarization for the two-direction indicator"},
      {"source.T", "record duration"},
      {"pulse.family", "poly_ramp | ramped_sine (default poly_ramp)"},
      {"pulse.k", "poly_ramp exponent (default 1)"},
      {"pulse.t_rise", "poly_ramp rise time (default 0.5; inf for no flattening)"},
      {"pulse.omega", "ramped_sine angular frequency"},
      {"pulse.t_ramp", "ramped_sine ramp time"},
      {"pulse.amplitude", "pulse amplitude (default 1)"},
      {"grid.h", "cell size"},
      {"grid.lo", "box lower corner x,y,z"},
      {"grid.hi", "box upper corner x,y,z"},
      {"grid.boundary", "pec | mur (default pec)"},
      {"grid.cfl", "fraction of the CFL limit (default 0.5)"},
      {"grid.threads", "worker threads (default 1; does not change results)"},
      {"tau.dist_guess", "distance guess for the default tau grid"},
      {"tau.min", "smallest tau (with tau.max)"},
      {"tau.max", "largest tau"},
      {"tau.count", "number of tau values (default 16)"},
      {"tau.span", "tau_max / tau_min for the default grid (default 8)"},
      {"run.mode", "scattered | total_pair | analytic_tilde (default scattered)"},
      {"run.seed", "seed for randomized checks (default 1)"},
      {"run.output_dir", "output directory (default out)"},
      {"run.store_background", "write the background volume store (default true)"},
      {"extract.model", "compensated | exponential (default compensated)"},
  };
  return keys;
}

ExperimentConfig make_config(const ConfigMap& map) {
  Reader r(map);
  ExperimentConfig c;
  c.medium.eps0 = r.num("medium.eps0", 1.0);
  c.medium.mu0 = r.num("medium.mu0", 1.0);
  c.medium.sigma0 = r.num("medium.sigma0", 0.0);

  const std::string shape = r.word("obstacle.shape", "none");
  if (shape != "none") {
    std::optional<Shape> s;
    if (shape == "sphere")
      s = Shape(Sphere{r.vec("obstacle.center", {}), r.num("obstacle.radius", 0.0)});
    else if (shape == "ellipsoid")
      s = Shape(Ellipsoid{r.vec("obstacle.center", {}), r.vec("obstacle.semi_axes", {})});
    else if (shape == "box")
      s = Shape(Box{r.vec("obstacle.lo", {}), r.vec("obstacle.hi", {})});
    else
      fail(ErrorKind::config, "unknown obstacle shape: " + shape);
    c.obstacle = ObstacleSpec{*s, r.num("obstacle.eps_r", 1.0) - 1.0, r.num("obstacle.mu_r", 1.0) - 1.0,
                              r.num("obstacle.sigma", 0.0)};
  }

  c.source.p = r.vec("source.p", {});
  c.source.eta = r.num("source.eta", 0.05);
  const Vec3 a = r.vec("source.a", {0, 0, 1});
  if (!(norm(a) > 0.0)) fail(ErrorKind::config, "source.a must be nonzero");
  c.source.a = normalized(a);
  c.directions.push_back(c.source.a);
  if (r.has("source.a2")) {
    const Vec3 a2 = r.vec("source.a2", {});
    if (!(norm(a2) > 0.0)) fail(ErrorKind::config, "source.a2 must be nonzero");
    c.directions.push_back(normalized(a2));
  }
  c.source.T = r.num("source.T", 1.0);

  const std::string fam = r.word("pulse.family", "poly_ramp");
  if (fam == "poly_ramp") {
    c.source.pulse = PulseSpec::linear_ramp(r.num("pulse.t_rise", 0.5));
    c.source.pulse.k = r.integer("pulse.k", 1);
  } else if (fam == "ramped_sine") {
    c.source.pulse = PulseSpec::ramped_sine(r.num("pulse.omega", 2.0 * M_PI), r.num("pulse.t_ramp", 0.25));
  } else {
    fail(ErrorKind::config, "unknown pulse family: " + fam);
  }
  c.source.pulse.amplitude = r.num("pulse.amplitude", 1.0);

  c.grid.h = r.num("grid.h", c.grid.h);
  c.grid.bounds.lo = r.vec("grid.lo", c.grid.bounds.lo);
  c.grid.bounds.hi = r.vec("grid.hi", c.grid.bounds.hi);
  const std::string b = r.word("grid.boundary", "pec");
  if (b == "pec")
    c.grid.boundary = BoundaryKind::pec;
  else if (b == "mur")
    c.grid.boundary = BoundaryKind::mur;
  else
    fail(ErrorKind::config, "unknown boundary: " + b);
  c.grid.cfl = r.num("grid.cfl", c.grid.cfl);
  c.grid.threads = r.integer("grid.threads", 1);

  if (r.has("tau.dist_guess")) c.tau.dist_guess = r.num("tau.dist_guess", 0.0);
  if (r.has("tau.min")) c.tau.tau_min = r.num("tau.min", 0.0);
  if (r.has("tau.max")) c.tau.tau_max = r.num("tau.max", 0.0);
  c.tau.count = r.integer("tau.count", 16);
  c.tau.span = r.num("tau.span", 8.0);

  c.mode = run_mode_from_string(r.word("run.mode", "scattered"));
  const double seed = r.num("run.seed", 1.0);
  if (seed < 0 || seed != std::floor(seed)) fail(ErrorKind::config, "run.seed must be a nonnegative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output_dir = r.word("run.output_dir", "out");
  c.store_background = r.flag("run.store_background", true);

  const std::string fit = r.word("extract.model", "compensated");
  if (fit == "compensated")
    c.fit = FitModel::compensated;
  else if (fit == "exponential")
    c.fit = FitModel::exponential;
  else
    fail(ErrorKind::config, "unknown extract model: " + fit);

  r.reject_unused();
  return c;
}

SourceSpec ExperimentConfig::source_for(std::size_t j) const {
  SourceSpec s = source;
  s.a = directions.at(j);
  return s;
}

std::string ExperimentConfig::fingerprint() const {
  Canon c;
  c.add("mode", to_string(mode));
  GridSpec g = grid;
  g.threads = 1;
  const MediumModel model{medium, obstacle, {}};
  for (std::size_t j = 0; j < directions.size(); ++j) c.add("run", run_fingerprint(model, source_for(j), g));
  return c.hash();
}

std::vector<double> ExperimentConfig::tau_grid() const {
  if (tau.tau_min || tau.tau_max) {
    if (!tau.tau_min || !tau.tau_max) fail(ErrorKind::config, "tau.min and tau.max go together");
    if (!(*tau.tau_min > 0.0 && *tau.tau_max > *tau.tau_min) || tau.count < 2)
      fail(ErrorKind::config, "tau grid needs 0 < tau.min < tau.max and tau.count >= 2");
    std::vector<double> v;
    const double ratio = *tau.tau_max / *tau.tau_min;
    for (int i = 0; i < tau.count; ++i)
      v.push_back(*tau.tau_min * std::pow(ratio, static_cast<double>(i) / (tau.count - 1)));
    return v;
  }
  double d = 0.0;
  if (tau.dist_guess)
    d = *tau.dist_guess;
  else if (obstacle)
    d = dist_D_B(obstacle->shape, source.p, source.eta);
  else
    fail(ErrorKind::config, "tau grid needs tau.dist_guess, tau.min/tau.max, or an obstacle");
  return default_tau_grid(d, medium, tau.count, tau.span);
}

void validate_config(const ExperimentConfig& cfg) {
  cfg.medium.validate();
  cfg.source.validate();
  if (cfg.directions.size() == 2 && norm(cross(cfg.directions[0], cfg.directions[1])) < 1e-8)
    fail(ErrorKind::config, "source.a and source.a2 must be linearly independent");
  if (cfg.obstacle) {
    cfg.obstacle->validate(cfg.medium);
    dist_D_B(cfg.obstacle->shape, cfg.source.p, cfg.source.eta);
  }
  GridSpec g = cfg.grid;
  prepare_grid(MediumModel{cfg.medium, cfg.obstacle, {}}, cfg.source, g);
}

}  // namespace emenc
