#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "lzeros/errors.hpp"
#include "lzeros/zero_set.hpp"

using namespace lzeros;

namespace {

ZeroSet sample_set() {
  ZeroSet zs;
  zs.zeros.push_back({{0.5, 2.0}, 1, Provenance::exact, std::nullopt, false});
  zs.zeros.push_back({{-0.25, 1.0}, 2, Provenance::approximate, 3L, true});
  zs.zeros.push_back({{-1.0, 2.0}, 1, Provenance::analytic, 0L, false});
  zs.window = Rect{-2, 2, 0, 4};
  zs.seed = 7;
  return zs;
}

}  // namespace

TEST_CASE("sort orders by t then beta") {
  auto zs = sample_set();
  zs.sort();
  CHECK(zs.zeros[0].z.t == 1.0);
  CHECK(zs.zeros[1].z.beta == -1.0);
  CHECK(zs.zeros[2].z.beta == 0.5);
  CHECK(zs.total_multiplicity() == 4);
}

TEST_CASE("count_in uses half-open boxes and multiplicity") {
  const auto zs = sample_set();
  CHECK(zs.count_in({-2, 2, 0, 4}) == 4);
  CHECK(zs.count_in({-2, 2, 0, 2}) == 2);
  CHECK(zs.count_in({-1, 0.5, 2, 3}) == 1);
}

TEST_CASE("csv round trip keeps every field") {
  auto zs = sample_set();
  zs.sort();
  std::stringstream ss;
  zs.write_csv(ss);
  CHECK(ss.str().rfind("beta,t,multiplicity,provenance,chain_id\n", 0) == 0);
  const auto back = ZeroSet::read_csv(ss);
  REQUIRE(back.size() == zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    CHECK(back.zeros[i].z == zs.zeros[i].z);
    CHECK(back.zeros[i].multiplicity == zs.zeros[i].multiplicity);
    CHECK(back.zeros[i].provenance == zs.zeros[i].provenance);
    CHECK(back.zeros[i].chain_id == zs.zeros[i].chain_id);
  }
}

TEST_CASE("json mirror carries window and seed") {
  const auto j = nlohmann::json::parse(sample_set().to_json());
  CHECK(j["seed"] == 7);
  CHECK(j["window"]["beta_max"] == 2.0);
  CHECK(j["zeros"].size() == 3);
  CHECK(j["zeros"][1]["multilevel"] == true);
}

TEST_CASE("mirrored set flips beta only") {
  const auto m = sample_set().mirrored_beta();
  CHECK(m.zeros.size() == 3);
  bool found = false;
  for (const auto& z : m.zeros) found = found || (z.z.beta == -0.5 && z.z.t == 2.0);
  CHECK(found);
  CHECK(m.window->beta_min == -2.0);
}

TEST_CASE("provenance names round trip") {
  for (auto p : {Provenance::exact, Provenance::approximate, Provenance::analytic})
    CHECK(parse_provenance(provenance_name(p)) == p);
  CHECK_THROWS(parse_provenance("guess"));
}

TEST_CASE("delta eta examples") {
  ZeroSet exact, approx;
  for (int i = 0; i < 4; ++i) exact.zeros.push_back({{0.0, 0.1 + i * 0.2}, 1, Provenance::exact, {}, false});
  for (int i = 0; i < 3; ++i) approx.zeros.push_back({{0.0, 0.1 + i * 0.2}, 1, Provenance::approximate, {}, false});
  const auto grid = BoxGrid::column(-1, 1, 0, 2, 1);
  REQUIRE(grid.boxes.size() == 2);
  const auto rows = delta_eta(exact, approx, grid);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].exact_count == 4);
  CHECK(rows[0].approx_count == 3);
  CHECK(*rows[0].value == doctest::Approx(0.25));
  CHECK_FALSE(rows[1].value.has_value());
  CHECK(rows[0].box_center_t == doctest::Approx(0.5));

  const auto same = delta_eta(exact, exact, grid);
  CHECK(*same[0].value == 0.0);
}

TEST_CASE("box grids are validated") {
  CHECK_THROWS_AS(BoxGrid::column(-1, 1, 0, 2, 0.0), InvalidArgument);
  BoxGrid g;
  g.boxes.push_back({{0, 1, 0, 1}});
  g.boxes.push_back({{0.5, 1.5, 0.5, 1.5}});
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.boxes.pop_back();
  g.boxes.push_back({{0, 1, 1, 2}});
  CHECK_NOTHROW(g.validate());
}
