#include "doctest.h"

#include <filesystem>

#include "holds/error.hpp"
#include "holds/io.hpp"
#include "support.hpp"

using namespace holds;
using nlohmann::json;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::UsageError;
}

}  // namespace

TEST_CASE("scenario round-trips exactly") {
  GeneratorConfig c;
  c.branch_count = 8;
  c.title_count = 20;
  c.availability_min_branches = 2;
  auto s = generate(c);
  auto back = scenario_from_json(json::parse(to_json(s).dump()));
  CHECK(to_json(back) == to_json(s));
  for (std::size_t i = 0; i < s.branch_count(); ++i) {
    CHECK(back.branches[i].demand_size == s.branches[i].demand_size);
    CHECK(back.branches[i].hold_fraction == s.branches[i].hold_fraction);
    CHECK(back.branches[i].label == s.branches[i].label);
  }
  for (std::size_t l = 0; l < s.title_count(); ++l) CHECK(back.titles[l].desirability == s.titles[l].desirability);
  CHECK(back.inventory == s.inventory);
  CHECK(back.calibration_scale == s.calibration_scale);
}

TEST_CASE("policy round-trips") {
  PolicySpec p;
  p.beta = {0.1, 0.25, 1.0};
  p.fulfillment = FulfillmentMethod::Tiered;
  p.tier_assignment = std::vector<int>{1, 3, 2};
  p.local_first = true;
  auto back = policy_from_json(json::parse(to_json(p).dump()));
  CHECK(back.beta == p.beta);
  CHECK(back.fulfillment == p.fulfillment);
  CHECK(back.tier_assignment == p.tier_assignment);
  CHECK(back.local_first);
}

TEST_CASE("instance, generator, search and baseline configs round-trip") {
  SmallInstance inst{Network{{1, 2}, {0.25, 0.5}, {1.0, 0.5}, {{0}, {0, 1}}}, 3};
  auto i2 = instance_from_json(to_json(inst));
  CHECK(i2.network.capacity == inst.network.capacity);
  CHECK(i2.network.rate == inst.network.rate);
  CHECK(i2.network.compatible == inst.network.compatible);
  CHECK(i2.horizon == 3);

  GeneratorConfig g;
  g.hold_corr = -0.3;
  CHECK(to_json(generator_config_from_json(to_json(g))) == to_json(g));

  SearchConfig sc;
  sc.batch_size = 4;
  CHECK(to_json(search_config_from_json(to_json(sc))) == to_json(sc));

  Baselines b{{1.5, 2.5}, {3.0, 4.0}, 9, 4, 365};
  CHECK(to_json(baselines_from_json(to_json(b))) == to_json(b));
}

TEST_CASE("unknown fields are rejected") {
  auto s = support::make_scenario({0.5}, {0.2}, {0.5}, {{1}});
  auto j = to_json(s);
  j["colour"] = "blue";
  CHECK(kind_of([&] { scenario_from_json(j); }) == ErrorKind::ParseError);

  json p = {{"beta", {0.5}}, {"fulfillment", "NearOptimal"}, {"extra", 1}};
  CHECK(kind_of([&] { policy_from_json(p); }) == ErrorKind::ParseError);

  json branch_extra = to_json(s);
  branch_extra["branches"][0]["income"] = 3;
  CHECK(kind_of([&] { scenario_from_json(branch_extra); }) == ErrorKind::ParseError);

  CHECK(kind_of([&] { generator_config_from_json(json{{"branches", 3}}); }) == ErrorKind::ParseError);
}

TEST_CASE("malformed input") {
  json wrong_type = {{"beta", "half"}, {"fulfillment", "NearOptimal"}};
  CHECK(kind_of([&] { policy_from_json(wrong_type); }) == ErrorKind::ParseError);
  json missing = {{"fulfillment", "NearOptimal"}};
  CHECK(kind_of([&] { policy_from_json(missing); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { read_json_file("/nonexistent/file.json"); }) == ErrorKind::FileError);

  auto dir = std::filesystem::temp_directory_path() / "holds_io_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "broken.json", "{not json");
  CHECK(kind_of([&] { read_json_file(dir / "broken.json"); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { load_baselines_for(dir / "nothing.json"); }) == ErrorKind::MissingBaseline);
  std::filesystem::remove_all(dir);
}
