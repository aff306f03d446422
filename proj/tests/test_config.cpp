#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lzeros/config.hpp"
#include "lzeros/errors.hpp"
#include "lzeros/toml.hpp"

using namespace lzeros;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "lzeros_config_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

const char* kMinimal = R"(
[distribution]
file = "levels.csv"

[window]
beta_min = -1
beta_max = 1
t_min = 0
t_max = 10
)";

}  // namespace

TEST_CASE("TOML scalars, tables and arrays") {
  const auto j = parse_toml(R"(
# comment
title = "run"   # trailing comment
lit = 'C:\path'
n = 42
neg = -7
big = 1_000
x = 3.5e-2
pos = +inf
flag = true
list = [1, 2.5,
        3]   # spans lines
names = ["a", "b",]

[outer]
inner.key = "dotted"
point = { beta = 0.5, t = 2 }

[outer.sub]
y = false
)");
  CHECK(j["title"] == "run");
  CHECK(j["lit"] == "C:\\path");
  CHECK(j["n"] == 42);
  CHECK(j["neg"] == -7);
  CHECK(j["big"] == 1000);
  CHECK(j["x"].get<double>() == doctest::Approx(0.035));
  CHECK(std::isinf(j["pos"].get<double>()));
  CHECK(j["flag"] == true);
  CHECK(j["list"].size() == 3);
  CHECK(j["names"].size() == 2);
  CHECK(j["outer"]["inner"]["key"] == "dotted");
  CHECK(j["outer"]["point"]["t"] == 2);
  CHECK(j["outer"]["sub"]["y"] == false);
}

TEST_CASE("TOML escapes") {
  const auto j = parse_toml(R"(s = "a\tb\n\"q\"\u00e9")");
  CHECK(j["s"] == "a\tb\n\"q\"\xc3\xa9");
}

TEST_CASE("TOML errors carry the line number") {
  auto message = [](const char* text) {
    try {
      parse_toml(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("a = 1\na = 2").find("line 2") != std::string::npos);
  CHECK(message("a = \"open").find("line 1") != std::string::npos);
  CHECK(message("x = 1\n\nd = 1979-05-27").find("line 3") != std::string::npos);
  CHECK(message("[t]\n[t]").find("line 2") != std::string::npos);
  CHECK_FALSE(message("= 3").empty());
  CHECK_FALSE(message("k = [1, 2").empty());
  CHECK_FALSE(message("s = \"\"\"multi\"\"\"").empty());
}

TEST_CASE("minimal config with defaults") {
  const auto c = RunConfig::from_json(parse_toml(kMinimal), "/data");
  CHECK(c.kind == ModelKind::distribution);
  CHECK(*c.distribution_file == "/data/levels.csv");
  CHECK(c.window.grid_k == 4);
  CHECK(c.window.winding_threshold == 0.2);
  CHECK(c.outputs.directory == "out");
  CHECK(c.outputs.csv);
  CHECK(c.outputs.json);
  CHECK_FALSE(c.outputs.svg);
  CHECK_FALSE(c.compare.has_value());
}

TEST_CASE("model sections") {
  const auto ising = RunConfig::from_json(parse_toml(R"(
[ising]
N = 100
h_i = 0.2
h_f = 0.6
[window]
beta_min = -1
beta_max = 1
t_min = 0
t_max = 10
seed = 9
[compare]
widths = [0.5, 2.0]
)"));
  CHECK(ising.kind == ModelKind::ising);
  CHECK(ising.spin->N == 100);
  CHECK(ising.spin->units == Units::per_site);
  CHECK(ising.spin->sector == Sector::even_parity);
  CHECK(ising.window.seed == 9);
  CHECK(ising.compare->height_mode == "local_spacing");
  CHECK(ising.compare->widths.size() == 2);

  const auto lr = RunConfig::from_json(parse_toml(R"(
[ising]
N = 8
alpha = 1.5
h_i = 0.1
h_f = 0.3
sector = "full"
[window]
beta_min = -1
beta_max = 1
t_min = 0
t_max = 10
)"));
  CHECK(lr.spin->units == Units::extensive);
  CHECK(lr.spin->sector == Sector::full);

  const auto xy = RunConfig::from_json(parse_toml(R"(
[xy]
N = 16
h_i = 0.5
h_f = -0.5
gamma_i = 1.5
gamma_f = -1.5
[window]
beta_min = -1
beta_max = 1
t_min = 0
t_max = 10
)"));
  CHECK(xy.kind == ModelKind::xy);
  CHECK(xy.two_band->gamma_f == -1.5);

  const auto g = RunConfig::from_json(parse_toml(R"(
[gaussian]
delta = 1.0
epsilon = 0.005
sigma = 1.5
[window]
beta_min = -1
beta_max = 1
t_min = 0
t_max = 10
)"));
  CHECK(g.gaussian->spec.j_min == -10);
  CHECK(g.gaussian->spec.epsilon == 0.005);
}

TEST_CASE("config errors") {
  const std::string window = "\n[window]\nbeta_min = -1\nbeta_max = 1\nt_min = 0\nt_max = 10\n";
  auto fails = [&](const std::string& text) {
    CHECK_THROWS_AS(RunConfig::from_json(parse_toml(text)), ConfigError);
  };
  fails("[ising]\nN = 4\nh_i = 0.1\nh_f = 0.2\n[xy]\nN = 4\nh_i = 0\nh_f = 1" + window);
  fails(window);
  fails("[ising]\nN = 4\nh_i = 0.1" + window);
  fails("[ising]\nN = 4\nh_i = 0.1\nh_f = 0.2\ncolour = 1" + window);
  fails("[ising]\nN = 4.5\nh_i = 0.1\nh_f = 0.2" + window);
  fails("[ising]\nN = 4\nh_i = 0.1\nh_f = 0.2\nsector = \"up\"" + window);
  fails("[ising]\nN = 4\nh_i = 0.1\nh_f = 0.2\n");
  fails("[ising]\nN = 4\nh_i = 0.1\nh_f = 0.2\n[extra]\na = 1" + window);
  fails("[gaussian]\ndelta = 1\nsigma = 1" + window + "grid_k = 1\n");
  fails("[gaussian]\ndelta = 1\nsigma = 1" + window + "seed = -2\n");
  fails("[gaussian]\ndelta = 1\nsigma = 1" + window + "[compare]\nwidths = []\n");
  fails("[gaussian]\ndelta = 1\nsigma = 1" + window + "[compare]\nwidths = [1]\nheight_mode = \"fixed\"\n");
  fails("[gaussian]\ndelta = 1\nsigma = 1" + window + "[outputs]\nformats = [\"png\"]\n");
  fails("[gaussian]\ndelta = 1\nsigma = 1" + window + "[heatmap]\nlog_floor = 2\n");
}

TEST_CASE("loading files adds the path to errors") {
  const auto good = write_temp("good.toml", kMinimal);
  const auto c = RunConfig::load(good);
  CHECK(c.source == good);
  CHECK(std::filesystem::path(*c.distribution_file).parent_path() == std::filesystem::path(good).parent_path());

  const auto bad = write_temp("bad.toml", "[window]\nbeta_min = 'x'\n");
  try {
    RunConfig::load(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.toml") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/none.toml"), ConfigError);

  const auto js = write_temp("run.json", R"({"gaussian": {"delta": 1, "sigma": 1.5},
    "window": {"beta_min": -1, "beta_max": 1, "t_min": 0, "t_max": 5}})");
  CHECK(RunConfig::load(js).kind == ModelKind::gaussian);
  const auto broken = write_temp("broken.json", "{");
  CHECK_THROWS_AS(RunConfig::load(broken), ConfigError);
}
