#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "emenc/config.hpp"
#include "emenc/error.hpp"

using namespace emenc;

namespace {

ConfigMap parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

const char* kScenario = R"(
# sphere in vacuum
[obstacle]
shape = sphere
center = 1.0, 0, 0   # on the x axis
radius = 0.25
eps_r = 3

[source]
p = 0,0,0
a = 0, 0, 2
T = 4

[grid]
h = 0.05
lo = -0.4, -0.6, -0.6
hi = 1.6, 0.6, 0.6
boundary = mur
)";

}  // namespace

TEST_CASE("sections, dotted keys and comments") {
  const ConfigMap m = parse(kScenario);
  CHECK(m.at("obstacle.center") == "1.0, 0, 0");
  CHECK(m.at("grid.h") == "0.05");
  CHECK(parse("x.y = 1\n[s]\nz = 2\n").at("s.z") == "2");
  CHECK(m.count("source.T") == 1);
  CHECK(kind_of([] { parse("a = 1\na = 2\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse("no equals sign\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse("[open\n"); }) == ErrorKind::config);
}

TEST_CASE("config values are typed and checked") {
  const ExperimentConfig c = make_config(parse(kScenario));
  REQUIRE(c.obstacle);
  CHECK(c.obstacle->eps_r({}) == doctest::Approx(3.0));
  CHECK(c.source.a.z == doctest::Approx(1.0));
  CHECK(c.directions.size() == 1);
  CHECK(c.grid.boundary == BoundaryKind::mur);
  CHECK(c.mode == RunMode::scattered);
  CHECK(c.fit == FitModel::compensated);

  CHECK(kind_of([] { make_config(parse("grid.spacing = 1\n")); }) == ErrorKind::config);
  CHECK(kind_of([] { make_config(parse("grid.h = abc\n")); }) == ErrorKind::config);
  CHECK(kind_of([] { make_config(parse("source.p = 1, 2\n")); }) == ErrorKind::config);
  CHECK(kind_of([] { make_config(parse("run.mode = psychic\n")); }) == ErrorKind::config);
  CHECK(kind_of([] { make_config(parse("pulse.k = 1.5\n")); }) == ErrorKind::config);
}

TEST_CASE("fingerprint tracks run inputs only") {
  const ExperimentConfig base = make_config(parse(kScenario));
  ExperimentConfig threads = base;
  threads.grid.threads = 4;
  threads.output_dir = "elsewhere";
  threads.tau.count = 9;
  CHECK(base.fingerprint() == threads.fingerprint());
  CHECK(base.fingerprint() == make_config(parse(kScenario)).fingerprint());

  ExperimentConfig eps = make_config(parse("obstacle.mu_r = 1.1\n" + std::string(kScenario)));
  CHECK(base.fingerprint() != eps.fingerprint());
  ExperimentConfig two = make_config(parse("source.a2 = 1, 0, 0\n" + std::string(kScenario)));
  CHECK(two.directions.size() == 2);
  CHECK(base.fingerprint() != two.fingerprint());
}

TEST_CASE("tau grid from explicit bounds or from geometry") {
  ExperimentConfig c = make_config(parse(kScenario));
  auto g = c.tau_grid();
  REQUIRE(g.size() == 16);
  CHECK(2.0 * 0.70 * g.back() == doctest::Approx(25.0));
  c.tau.tau_min = 2.0;
  c.tau.tau_max = 20.0;
  c.tau.count = 5;
  g = c.tau_grid();
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(2.0 * std::pow(10.0, 0.25)));
  CHECK(g.back() == doctest::Approx(20.0));
  c.tau.tau_max.reset();
  CHECK(kind_of([&] { c.tau_grid(); }) == ErrorKind::config);
}

TEST_CASE("validation before compute") {
  CHECK_NOTHROW(validate_config(make_config(parse(kScenario))));
  const std::string overlap = "source.eta = 0.8\n" + std::string(kScenario);
  CHECK(kind_of([&] { validate_config(make_config(parse(overlap))); }) == ErrorKind::geometry);
  const std::string same = "source.a2 = 0, 0, -1\n" + std::string(kScenario);
  CHECK(kind_of([&] { validate_config(make_config(parse(same))); }) == ErrorKind::config);
  std::string pec = kScenario;
  pec.replace(pec.find("boundary = mur"), 14, "boundary = pec");
  CHECK(kind_of([&] { validate_config(make_config(parse(pec))); }) == ErrorKind::config);
}
