#include "holds/fulfillment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "holds/error.hpp"

namespace holds {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Network library_network(std::span<const double> title_rates, std::span<const std::int32_t> capacity,
                        std::span<const double> rewards) {
  const std::size_t branches = capacity.size() / 2;
  Network net;
  net.capacity.assign(capacity.begin(), capacity.end());
  net.rate.assign(title_rates.begin(), title_rates.end());
  net.reward.assign(rewards.begin(), rewards.end());
  net.compatible.resize(2 * branches);
  for (std::size_t j = 0; j < 2 * branches; ++j)
    for (const auto& a : compatibility(PatronClass::from_flat(j), branches))
      net.compatible[j].push_back(a.flat());
  return net;
}

GammaTable compute_gammas(const Network& net, int horizon) {
  const std::size_t n = net.copy_classes();
  GammaTable g(n, horizon);
  g.capacities = net.capacity;
  std::vector<double> delta(n);
  for (int t = horizon; t >= 1; --t) {
    std::fill(delta.begin(), delta.end(), 0.0);
    for (std::size_t j = 0; j < net.patron_classes(); ++j) {
      std::size_t best = kNone;
      double best_gamma = kInf;
      for (std::size_t a : net.compatible[j]) {
        if (net.capacity[a] <= 0) continue;
        double v = g.at(a, t + 1);
        if (v < best_gamma || (v == best_gamma && a < best)) {
          best = a;
          best_gamma = v;
        }
      }
      if (best == kNone) continue;
      double gain = net.reward[j] - best_gamma;
      if (gain > 0.0) delta[best] += net.rate[j] / net.capacity[best] * gain;
    }
    for (std::size_t a = 0; a < n; ++a) g.at(a, t) = g.at(a, t + 1) + delta[a];
  }
  return g;
}

void compute_library_gammas(std::span<const double> rates, std::span<const std::int32_t> cap,
                            std::span<const double> rewards, int horizon, GammaTable& out) {
  const std::size_t n = cap.size();
  const std::size_t branches = n / 2;
  if (out.class_count() != n || out.horizon() != horizon) out = GammaTable(n, horizon);
  out.capacities.assign(cap.begin(), cap.end());
  for (std::size_t a = 0; a < n; ++a) out.at(a, horizon + 1) = 0.0;

  for (int t = horizon; t >= 1; --t) {
    auto next = out.period(t + 1);
    std::size_t best_open = kNone;
    double best_open_gamma = kInf;
    for (std::size_t i = 0; i < branches; ++i) {
      std::size_t a = 2 * i + 1;
      if (cap[a] > 0 && next[a] < best_open_gamma) {
        best_open = a;
        best_open_gamma = next[a];
      }
    }
    // Row t starts as a copy of row t+1; contributions are added in patron
    // order so the rounding matches the generic recursion.
    double* cur = &out.at(0, t);
    std::fill(cur, cur + n, 0.0);
    for (std::size_t i = 0; i < branches; ++i) {
      const std::size_t reserve = 2 * i;
      const std::size_t open = reserve + 1;
      // Browse patron 2i.
      std::size_t pick = kNone;
      double pick_gamma = kInf;
      if (cap[reserve] > 0) {
        pick = reserve;
        pick_gamma = next[reserve];
      }
      if (cap[open] > 0 && next[open] < pick_gamma) {
        pick = open;
        pick_gamma = next[open];
      }
      if (pick != kNone) {
        double gain = rewards[reserve] - pick_gamma;
        if (gain > 0.0) cur[pick] += rates[reserve] / cap[pick] * gain;
      }
      // Hold patron 2i+1.
      if (best_open != kNone) {
        double gain = rewards[open] - best_open_gamma;
        if (gain > 0.0) cur[best_open] += rates[open] / cap[best_open] * gain;
      }
    }
    for (std::size_t a = 0; a < n; ++a) cur[a] = next[a] + cur[a];
  }
}

double approx_value(const GammaTable& gammas, std::span<const std::int32_t> x, int t) {
  double h = 0.0;
  auto row = gammas.period(t);
  for (std::size_t a = 0; a < x.size(); ++a) h += row[a] * x[a];
  return h;
}

namespace {

// Smaller gamma wins; equal gammas go to the larger shelf, then the lower index.
bool better(double gamma, std::int32_t stock, std::size_t a, double best_gamma,
            std::int32_t best_stock, std::size_t best) {
  if (gamma != best_gamma) return gamma < best_gamma;
  if (stock != best_stock) return stock > best_stock;
  return a < best;
}

}  // namespace

std::optional<std::size_t> decide_near_optimal(const GammaTable& gammas,
                                               std::span<const std::int32_t> x, int t,
                                               std::span<const std::size_t> compatible,
                                               double reward) {
  auto next = gammas.period(t + 1);
  std::size_t best = kNone;
  double best_gamma = kInf;
  for (std::size_t a : compatible) {
    if (x[a] <= 0) continue;
    if (better(next[a], x[a], a, best_gamma, best == kNone ? 0 : x[best], best)) {
      best = a;
      best_gamma = next[a];
    }
  }
  if (best == kNone || reward < best_gamma) return std::nullopt;
  return best;
}

std::optional<CopyClass> decide_near_optimal(const GammaTable& gammas,
                                             std::span<const std::int32_t> x, int t, PatronClass j,
                                             const RewardVector& rewards) {
  auto next = gammas.period(t + 1);
  const std::size_t branches = x.size() / 2;
  std::size_t best = kNone;
  double best_gamma = kInf;
  if (j.mode == Mode::Browse) {
    for (std::size_t a : {2 * j.branch.index, 2 * j.branch.index + 1}) {
      if (x[a] > 0 && better(next[a], x[a], a, best_gamma, best == kNone ? 0 : x[best], best)) {
        best = a;
        best_gamma = next[a];
      }
    }
  } else {
    for (std::size_t i = 0; i < branches; ++i) {
      std::size_t a = 2 * i + 1;
      if (x[a] > 0 && better(next[a], x[a], a, best_gamma, best == kNone ? 0 : x[best], best)) {
        best = a;
        best_gamma = next[a];
      }
    }
  }
  if (best == kNone || rewards.r[j.flat()] < best_gamma) return std::nullopt;
  return CopyClass::from_flat(best);
}

RewardVector usage_rewards(const Scenario& scenario, std::span<const double> baseline_co) {
  const std::size_t branches = scenario.branch_count();
  if (baseline_co.size() != branches)
    throw Error(ErrorKind::ConfigError, "baseline_co length != branch count");
  double total_p = 0.0;
  for (const auto& b : scenario.branches) total_p += b.demand_size;
  std::vector<double> per_branch(branches);
  for (std::size_t i = 0; i < branches; ++i) {
    if (!(baseline_co[i] > 0.0))
      throw Error(ErrorKind::ZeroBaseline,
                  "baseline checkouts at branch " + std::to_string(i) + " are zero");
    per_branch[i] = scenario.branches[i].demand_size / total_p / baseline_co[i];
  }
  double scale = 1.0 / *std::max_element(per_branch.begin(), per_branch.end());
  RewardVector out;
  out.r.resize(2 * branches);
  for (std::size_t i = 0; i < branches; ++i) {
    double r = per_branch[i] * scale;
    out.r[2 * i] = r;
    out.r[2 * i + 1] = r;
  }
  return out;
}

std::vector<std::size_t> tier_sizes(std::size_t n) {
  std::vector<std::size_t> sizes(3, n / 3);
  for (std::size_t k = 0; k < n % 3; ++k) ++sizes[k];
  return sizes;
}

TierAssignment derive_tiers(const std::vector<std::vector<double>>& open_gamma,
                            const std::vector<std::vector<std::int32_t>>& open_stock) {
  if (open_gamma.size() != open_stock.size())
    throw Error(ErrorKind::ConfigError, "gamma and stock title counts differ");
  const std::size_t branches = open_gamma.empty() ? 0 : open_gamma.front().size();
  std::vector<double> sum(branches, 0.0);
  std::vector<std::size_t> count(branches, 0);
  for (std::size_t l = 0; l < open_gamma.size(); ++l) {
    for (std::size_t i = 0; i < branches; ++i) {
      if (open_stock[l][i] > 0) {
        sum[i] += open_gamma[l][i];
        ++count[i];
      }
    }
  }
  TierAssignment out;
  out.average_unit_reward.resize(branches);
  for (std::size_t i = 0; i < branches; ++i)
    out.average_unit_reward[i] = count[i] > 0 ? sum[i] / static_cast<double>(count[i]) : kInf;

  std::vector<std::size_t> order(branches);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.average_unit_reward[a] < out.average_unit_reward[b];
  });
  out.tier.assign(branches, 3);
  auto sizes = tier_sizes(branches);
  std::size_t pos = 0;
  for (int tier = 1; tier <= 3; ++tier)
    for (std::size_t k = 0; k < sizes[tier - 1]; ++k) out.tier[order[pos++]] = tier;
  return out;
}

std::optional<CopyClass> serve_browser_local(std::span<const std::int32_t> x, BranchId branch) {
  if (x[2 * branch.index] > 0) return CopyClass{branch, Pool::Reserve};
  if (x[2 * branch.index + 1] > 0) return CopyClass{branch, Pool::Open};
  return std::nullopt;
}

std::optional<CopyClass> decide_tiered(std::span<const int> tiers, std::span<const std::int32_t> x,
                                       PatronClass j, bool local_first) {
  if (j.mode == Mode::Browse) return serve_browser_local(x, j.branch);
  if (local_first && x[2 * j.branch.index + 1] > 0) return CopyClass{j.branch, Pool::Open};
  for (int tier = 1; tier <= 3; ++tier) {
    std::size_t best = kNone;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
      if (tiers[i] != tier) continue;
      std::int32_t stock = x[2 * i + 1];
      if (stock > 0 && (best == kNone || stock > x[2 * best + 1])) best = i;
    }
    if (best != kNone) return CopyClass{BranchId{best}, Pool::Open};
  }
  return std::nullopt;
}

}  // namespace holds
