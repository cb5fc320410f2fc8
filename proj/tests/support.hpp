#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "holds/fulfillment.hpp"
#include "holds/model.hpp"
#include "holds/oracles.hpp"

namespace support {

using holds::Network;
using holds::SmallInstance;
using Rational = boost::multiprecision::cpp_rational;

// Random dyadic value k / 2^bits with k uniform in [lo, hi].
inline double dyadic(std::mt19937_64& rng, int lo, int hi, int bits) {
  std::uniform_int_distribution<int> k(lo, hi);
  return std::ldexp(static_cast<double>(k(rng)), -bits);
}

// Library-shaped instance over `branches` branches: 2B copy classes, 2B
// patron classes with the usual compatibility. Total copies <= max_copies,
// rates dyadic with sum <= 1, rewards dyadic in [0, 1].
inline SmallInstance random_library_instance(std::mt19937_64& rng, int branches, int max_copies,
                                             int max_horizon) {
  const int n = 2 * branches;
  SmallInstance inst;
  std::uniform_int_distribution<int> horizon(1, max_horizon);
  inst.horizon = horizon(rng);
  std::vector<std::int32_t> cap(static_cast<std::size_t>(n), 0);
  std::uniform_int_distribution<int> total(0, max_copies), slot(0, n - 1);
  for (int k = total(rng); k > 0; --k) ++cap[static_cast<std::size_t>(slot(rng))];
  // Up to 16/128 per class keeps the sum below 1 for three branches.
  std::vector<double> rates(static_cast<std::size_t>(n));
  for (auto& r : rates) r = dyadic(rng, 0, 16, 7);
  std::vector<double> rewards(static_cast<std::size_t>(n));
  for (auto& r : rewards) r = dyadic(rng, 0, 8, 3);
  inst.network = holds::library_network(rates, cap, rewards);
  return inst;
}

// Arbitrary bipartite instance: up to `max_classes` copy and patron classes,
// random non-empty compatibility sets.
inline SmallInstance random_general_instance(std::mt19937_64& rng, int max_classes, int max_copies,
                                             int max_horizon) {
  std::uniform_int_distribution<int> classes(1, max_classes), cap(0, max_copies),
      horizon(1, max_horizon);
  SmallInstance inst;
  inst.horizon = horizon(rng);
  const int copies = classes(rng), patrons = classes(rng);
  for (int a = 0; a < copies; ++a) inst.network.capacity.push_back(cap(rng));
  double budget = 1.0;
  for (int j = 0; j < patrons; ++j) {
    double rate = std::min(budget, dyadic(rng, 0, 16, 6));
    budget -= rate;
    inst.network.rate.push_back(rate);
    inst.network.reward.push_back(dyadic(rng, 0, 8, 3));
    std::vector<std::size_t> compat;
    for (int a = 0; a < copies; ++a)
      if (std::bernoulli_distribution(0.6)(rng)) compat.push_back(static_cast<std::size_t>(a));
    if (compat.empty()) compat.push_back(static_cast<std::size_t>(copies - 1));
    inst.network.compatible.push_back(compat);
  }
  return inst;
}

// Exact LP optimum by a dense rational simplex with Bland's rule:
// max sum r_j z_ja  s.t.  sum_a z_ja <= T lambda_j, sum_j z_ja <= c_a, z >= 0.
// The slack basis is feasible because every right-hand side is >= 0.
inline Rational simplex_lp(const SmallInstance& inst) {
  const auto& net = inst.network;
  struct Var {
    std::size_t j, a;
  };
  std::vector<Var> vars;
  for (std::size_t j = 0; j < net.patron_classes(); ++j)
    for (std::size_t a : net.compatible[j]) vars.push_back({j, a});
  const std::size_t m = net.patron_classes() + net.copy_classes();
  const std::size_t nv = vars.size();
  const std::size_t cols = nv + m;
  // Tableau rows 0..m-1 constraints, row m objective (reduced costs, negated).
  std::vector<std::vector<Rational>> tab(m + 1, std::vector<Rational>(cols + 1, Rational(0)));
  for (std::size_t v = 0; v < nv; ++v) {
    tab[vars[v].j][v] = 1;
    tab[net.patron_classes() + vars[v].a][v] = 1;
    tab[m][v] = -Rational(net.reward[vars[v].j]);
  }
  for (std::size_t j = 0; j < net.patron_classes(); ++j)
    tab[j][cols] = Rational(net.rate[j]) * inst.horizon;
  for (std::size_t a = 0; a < net.copy_classes(); ++a) tab[net.patron_classes() + a][cols] = net.capacity[a];
  for (std::size_t r = 0; r < m; ++r) tab[r][nv + r] = 1;
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = nv + r;

  while (true) {
    std::optional<std::size_t> enter;
    for (std::size_t c = 0; c < cols; ++c)
      if (tab[m][c] < 0) {
        enter = c;
        break;
      }
    if (!enter) break;
    std::optional<std::size_t> leave;
    Rational best_ratio;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab[r][*enter] <= 0) continue;
      Rational ratio = tab[r][cols] / tab[r][*enter];
      if (!leave || ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[*leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (!leave) break;  // unbounded cannot happen: all variables are capped
    const Rational pivot = tab[*leave][*enter];
    for (auto& v : tab[*leave]) v /= pivot;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == *leave || tab[r][*enter] == 0) continue;
      const Rational factor = tab[r][*enter];
      for (std::size_t c = 0; c <= cols; ++c) tab[r][c] -= factor * tab[*leave][c];
    }
    basis[*leave] = *enter;
  }
  return tab[m][cols];
}

// Memoized V_t(x) written straight from the verbal recursion: per period at
// most one arrival; an arriving class either takes a copy from some stocked
// compatible class (collect r_j) or is turned away.
class DirectDp {
 public:
  explicit DirectDp(const SmallInstance& inst) : inst_(inst) {}

  double value(int t, std::vector<std::int32_t> x) {
    if (t > inst_.horizon) return 0.0;
    auto key = std::make_pair(t, x);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const auto& net = inst_.network;
    const double stay = value(t + 1, x);
    double total = 0.0, none = 1.0;
    for (std::size_t j = 0; j < net.patron_classes(); ++j) {
      none -= net.rate[j];
      double best = stay;
      for (std::size_t a : net.compatible[j]) {
        if (x[a] == 0) continue;
        --x[a];
        best = std::max(best, net.reward[j] + value(t + 1, x));
        ++x[a];
      }
      total += net.rate[j] * best;
    }
    total += none * stay;
    memo_[key] = total;
    return total;
  }

 private:
  const SmallInstance& inst_;
  std::map<std::pair<int, std::vector<std::int32_t>>, double> memo_;
};

// The coefficient recursion restated plainly: every class keeps its own column, every
// patron class picks its best stocked class at t+1 (lowest gamma, first
// index on ties) and adds lambda/c * (r - gamma)^+.
inline std::vector<std::vector<double>> direct_gammas(const Network& net, int horizon) {
  const std::size_t n = net.copy_classes();
  std::vector<std::vector<double>> g(static_cast<std::size_t>(horizon + 2), std::vector<double>(n, 0.0));
  for (int t = horizon; t >= 1; --t) {
    auto& cur = g[static_cast<std::size_t>(t)];
    const auto& next = g[static_cast<std::size_t>(t + 1)];
    cur = next;
    for (std::size_t j = 0; j < net.patron_classes(); ++j) {
      std::optional<std::size_t> pick;
      for (std::size_t a : net.compatible[j])
        if (net.capacity[a] > 0 && (!pick || next[a] < next[*pick])) pick = a;
      if (!pick) continue;
      double gain = net.reward[j] - next[*pick];
      if (gain > 0.0) cur[*pick] += net.rate[j] / net.capacity[*pick] * gain;
    }
  }
  return g;
}

// A scenario from explicit parameters; inventory[branch][title].
inline holds::Scenario make_scenario(std::vector<double> demand, std::vector<double> hold,
                                     std::vector<double> desirability,
                                     std::vector<std::vector<std::int32_t>> inventory, double scale = 1.0) {
  holds::Scenario s;
  for (std::size_t i = 0; i < demand.size(); ++i)
    s.branches.push_back({demand[i], hold[i], "b" + std::to_string(i)});
  for (double d : desirability) s.titles.push_back({d});
  s.inventory = std::move(inventory);
  s.calibration_scale = scale;
  s.sim_days = 200;
  s.warmup_days = 20;
  return s;
}

}  // namespace support
