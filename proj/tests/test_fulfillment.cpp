#include "doctest.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "holds/error.hpp"
#include "holds/fulfillment.hpp"
#include "support.hpp"

using namespace holds;

namespace {

Network one_class(double rate, double reward, std::int32_t cap) {
  return Network{{cap}, {rate}, {reward}, {{0}}};
}

}  // namespace

TEST_CASE("gamma recursion on a single class") {
  auto g = compute_gammas(one_class(0.5, 1.0, 1), 2);
  CHECK(g.at(0, 3) == 0.0);
  CHECK(g.at(0, 2) == 0.5);
  CHECK(g.at(0, 1) == 0.75);
  CHECK(approx_value(g, std::vector<std::int32_t>{1}, 1) == 0.75);
  CHECK(approx_value(g, std::vector<std::int32_t>{0}, 1) == 0.0);
}

TEST_CASE("no demand gives zero gammas") {
  Network net{{2, 1}, {0.0, 0.0}, {1.0, 1.0}, {{0, 1}, {1}}};
  auto g = compute_gammas(net, 5);
  for (int t = 1; t <= 6; ++t)
    for (std::size_t a = 0; a < 2; ++a) CHECK(g.at(a, t) == 0.0);
}

TEST_CASE("zero-capacity classes keep gamma zero") {
  Network net{{0, 2}, {0.3, 0.2}, {1.0, 1.0}, {{0, 1}, {0}}};
  auto g = compute_gammas(net, 4);
  for (int t = 1; t <= 5; ++t) CHECK(g.at(0, t) == 0.0);
  CHECK(g.at(1, 1) > 0.0);
}

TEST_CASE("gammas match a direct restatement and are monotone") {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 300; ++k) {
    auto inst = support::random_general_instance(rng, 4, 4, 8);
    auto g = compute_gammas(inst.network, inst.horizon);
    auto direct = support::direct_gammas(inst.network, inst.horizon);
    for (int t = 1; t <= inst.horizon + 1; ++t)
      for (std::size_t a = 0; a < inst.network.copy_classes(); ++a) {
        CHECK(g.at(a, t) == doctest::Approx(direct[static_cast<std::size_t>(t)][a]).epsilon(1e-12));
        if (t <= inst.horizon) CHECK(g.at(a, t) >= g.at(a, t + 1));
        CHECK(g.at(a, t) >= 0.0);
      }
  }
}

TEST_CASE("library gammas are bit-identical to the generic recursion") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const int branches = 1 + k % 4;
    auto inst = support::random_library_instance(rng, branches, 8, 21);
    auto generic = compute_gammas(inst.network, inst.horizon);
    GammaTable library;
    compute_library_gammas(inst.network.rate, inst.network.capacity, inst.network.reward, inst.horizon,
                           library);
    for (int t = 1; t <= inst.horizon + 1; ++t)
      for (std::size_t a = 0; a < inst.network.copy_classes(); ++a) CHECK(library.at(a, t) == generic.at(a, t));
  }
}

TEST_CASE("uniform rewards keep gammas at most one") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    auto inst = support::random_library_instance(rng, 3, 8, 21);
    std::fill(inst.network.reward.begin(), inst.network.reward.end(), 1.0);
    auto g = compute_gammas(inst.network, inst.horizon);
    for (int t = 1; t <= inst.horizon; ++t)
      for (std::size_t a = 0; a < inst.network.copy_classes(); ++a) CHECK(g.at(a, t) <= 1.0 + 1e-12);
  }
}

TEST_CASE("doubling rewards doubles gammas") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    auto inst = support::random_general_instance(rng, 4, 4, 8);
    auto scaled = inst;
    for (auto& r : scaled.network.reward) r *= 2.0;
    auto g = compute_gammas(inst.network, inst.horizon);
    auto g2 = compute_gammas(scaled.network, scaled.horizon);
    for (int t = 1; t <= inst.horizon; ++t)
      for (std::size_t a = 0; a < inst.network.copy_classes(); ++a) CHECK(g2.at(a, t) == 2.0 * g.at(a, t));
  }
}

TEST_CASE("near-optimal decision examples") {
  // Two branches; gammas at t+1 = 2 for the open classes are 0.3 and 0.6.
  GammaTable g(4, 2);
  g.at(1, 2) = 0.3;
  g.at(3, 2) = 0.6;
  std::vector<std::int32_t> x{0, 1, 0, 1};
  const PatronClass hold{BranchId{1}, Mode::Hold};
  RewardVector r{{0.0, 0.0, 0.0, 0.5}};
  auto pick = decide_near_optimal(g, x, 1, hold, r);
  REQUIRE(pick);
  CHECK(*pick == CopyClass{BranchId{0}, Pool::Open});

  r.r[3] = 0.2;
  CHECK_FALSE(decide_near_optimal(g, x, 1, hold, r));

  std::vector<std::int32_t> empty{0, 0, 0, 0};
  CHECK_FALSE(decide_near_optimal(g, empty, 1, hold, RewardVector::uniform(2)));

  // Same decisions through the generic interface.
  std::vector<std::size_t> open{1, 3};
  CHECK(decide_near_optimal(g, x, 1, open, 0.5) == std::optional<std::size_t>(1));
  CHECK_FALSE(decide_near_optimal(g, x, 1, open, 0.2));
}

TEST_CASE("equal gammas go to the larger shelf") {
  GammaTable g(6, 1);
  std::vector<std::int32_t> x{0, 1, 0, 3, 0, 3};
  auto pick = decide_near_optimal(g, x, 1, PatronClass{BranchId{0}, Mode::Hold}, RewardVector::uniform(3));
  REQUIRE(pick);
  CHECK(pick->branch.index == 1);
}

TEST_CASE("decisions never use empty classes and holds never take reserves") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 200; ++k) {
    auto inst = support::random_library_instance(rng, 3, 8, 10);
    auto g = compute_gammas(inst.network, inst.horizon);
    RewardVector r{inst.network.reward};
    std::uniform_int_distribution<int> stock(0, 2);
    std::vector<std::int32_t> x(inst.network.copy_classes());
    for (auto& v : x) v = stock(rng);
    for (int t = 1; t <= inst.horizon; ++t)
      for (std::size_t j = 0; j < inst.network.patron_classes(); ++j) {
        auto p = PatronClass::from_flat(j);
        auto pick = decide_near_optimal(g, x, t, p, r);
        auto generic = decide_near_optimal(g, x, t, inst.network.compatible[j], r.r[j]);
        CHECK(pick.has_value() == generic.has_value());
        if (!pick) continue;
        CHECK(pick->flat() == *generic);
        CHECK(x[pick->flat()] > 0);
        if (p.mode == Mode::Hold) CHECK(pick->pool == Pool::Open);
      }
  }
}

TEST_CASE("uniform rewards never reject while stock exists") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 200; ++k) {
    auto inst = support::random_library_instance(rng, 3, 8, 21);
    std::fill(inst.network.reward.begin(), inst.network.reward.end(), 1.0);
    auto g = compute_gammas(inst.network, inst.horizon);
    auto r = RewardVector::uniform(3);
    std::vector<std::int32_t> x(inst.network.capacity);
    for (int t = 1; t <= inst.horizon; ++t)
      for (std::size_t j = 0; j < 6; ++j) {
        bool stocked = false;
        for (auto a : inst.network.compatible[j]) stocked = stocked || x[a] > 0;
        CHECK(decide_near_optimal(g, x, t, PatronClass::from_flat(j), r).has_value() == stocked);
      }
  }
}

TEST_CASE("scaling rewards leaves every decision unchanged") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    auto inst = support::random_library_instance(rng, 3, 8, 12);
    RewardVector r{inst.network.reward}, r2{inst.network.reward};
    for (auto& v : r2.r) v *= 2.0;
    GammaTable g, g2;
    compute_library_gammas(inst.network.rate, inst.network.capacity, r.r, inst.horizon, g);
    compute_library_gammas(inst.network.rate, inst.network.capacity, r2.r, inst.horizon, g2);
    std::uniform_int_distribution<int> stock(0, 2);
    std::vector<std::int32_t> x(inst.network.copy_classes());
    for (auto& v : x) v = stock(rng);
    for (int t = 1; t <= inst.horizon; ++t)
      for (std::size_t j = 0; j < 6; ++j) {
        auto p = PatronClass::from_flat(j);
        CHECK(decide_near_optimal(g, x, t, p, r) == decide_near_optimal(g2, x, t, p, r2));
      }
  }
}

TEST_CASE("usage-aligned rewards") {
  auto s = support::make_scenario({0.5, 0.5}, {0.2, 0.2}, {0.5}, {{1}, {1}});
  auto r = usage_rewards(s, std::vector<double>{100, 100});
  CHECK(r.r == std::vector<double>{1.0, 1.0, 1.0, 1.0});

  auto t = support::make_scenario({0.8, 0.2}, {0.2, 0.2}, {0.5}, {{1}, {1}});
  auto q = usage_rewards(t, std::vector<double>{100, 100});
  CHECK(q.r[0] == 1.0);
  CHECK(q.r[1] == 1.0);
  CHECK(q.r[2] == doctest::Approx(0.25));
  CHECK(q.r[0] / q.r[2] == doctest::Approx(4.0));

  auto single = support::make_scenario({0.3}, {0.2}, {0.5}, {{1}});
  CHECK(usage_rewards(single, std::vector<double>{7}).r == std::vector<double>{1.0, 1.0});

  try {
    usage_rewards(s, std::vector<double>{100, 0});
    FAIL("expected ZeroBaseline");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroBaseline);
  }
}

TEST_CASE("tier sizes are balanced with extras first") {
  CHECK(tier_sizes(84) == std::vector<std::size_t>{28, 28, 28});
  CHECK(tier_sizes(8) == std::vector<std::size_t>{3, 3, 2});
  CHECK(tier_sizes(7) == std::vector<std::size_t>{3, 2, 2});
  CHECK(tier_sizes(3) == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("average unit reward counts stocked titles only") {
  // One branch of interest (index 0) plus two others to fill the tiers.
  std::vector<std::vector<double>> gamma{{0.4, 1.0, 2.0}, {0.9, 1.0, 2.0}, {0.2, 1.0, 2.0}};
  std::vector<std::vector<std::int32_t>> stock{{2, 1, 1}, {0, 1, 1}, {1, 1, 1}};
  auto tiers = derive_tiers(gamma, stock);
  CHECK(tiers.average_unit_reward[0] == doctest::Approx(0.3));
  CHECK(tiers.average_unit_reward[1] == doctest::Approx(1.0));
  CHECK(tiers.tier == std::vector<int>{1, 2, 3});
}

TEST_CASE("branches with nothing stocked land in the last tier") {
  std::vector<std::vector<double>> gamma{{0.0, 0.5, 0.1}};
  std::vector<std::vector<std::int32_t>> stock{{0, 1, 1}};
  auto tiers = derive_tiers(gamma, stock);
  CHECK(std::isinf(tiers.average_unit_reward[0]));
  CHECK(tiers.tier == std::vector<int>{3, 2, 1});
}

TEST_CASE("tier derivation is permutation equivariant") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> c(0, 2);
  const std::size_t n = 10, titles = 6;
  std::vector<std::vector<double>> gamma(titles, std::vector<double>(n));
  std::vector<std::vector<std::int32_t>> stock(titles, std::vector<std::int32_t>(n));
  for (std::size_t l = 0; l < titles; ++l)
    for (std::size_t i = 0; i < n; ++i) {
      gamma[l][i] = u(rng);
      stock[l][i] = c(rng);
    }
  auto base = derive_tiers(gamma, stock);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(perm.begin(), perm.end(), rng);
    auto g2 = gamma;
    auto s2 = stock;
    for (std::size_t l = 0; l < titles; ++l)
      for (std::size_t i = 0; i < n; ++i) {
        g2[l][perm[i]] = gamma[l][i];
        s2[l][perm[i]] = stock[l][i];
      }
    auto permuted = derive_tiers(g2, s2);
    for (std::size_t i = 0; i < n; ++i) CHECK(permuted.tier[perm[i]] == base.tier[i]);
  }
}

TEST_CASE("tiered paging") {
  const PatronClass hold_a{BranchId{0}, Mode::Hold};
  std::vector<int> tiers{1, 2};
  auto pick = decide_tiered(tiers, std::vector<std::int32_t>{0, 0, 0, 1}, hold_a, false);
  REQUIRE(pick);
  CHECK(*pick == CopyClass{BranchId{1}, Pool::Open});

  std::vector<int> same{1, 1};
  pick = decide_tiered(same, std::vector<std::int32_t>{0, 2, 0, 1}, hold_a, false);
  REQUIRE(pick);
  CHECK(*pick == CopyClass{BranchId{0}, Pool::Open});

  CHECK_FALSE(decide_tiered(same, std::vector<std::int32_t>{3, 0, 2, 0}, hold_a, false));

  // Local first takes the patron's own pool ahead of tier 1.
  std::vector<int> local{1, 3};
  const PatronClass hold_b{BranchId{1}, Mode::Hold};
  pick = decide_tiered(local, std::vector<std::int32_t>{0, 1, 0, 1}, hold_b, true);
  REQUIRE(pick);
  CHECK(pick->branch.index == 1);
  pick = decide_tiered(local, std::vector<std::int32_t>{0, 1, 0, 1}, hold_b, false);
  REQUIRE(pick);
  CHECK(pick->branch.index == 0);
}

TEST_CASE("browsers take their reserve first") {
  auto pick = serve_browser_local(std::vector<std::int32_t>{1, 1}, BranchId{0});
  REQUIRE(pick);
  CHECK(pick->pool == Pool::Reserve);
  pick = serve_browser_local(std::vector<std::int32_t>{0, 1}, BranchId{0});
  REQUIRE(pick);
  CHECK(pick->pool == Pool::Open);
  CHECK_FALSE(serve_browser_local(std::vector<std::int32_t>{0, 0, 1, 1}, BranchId{0}));
}
