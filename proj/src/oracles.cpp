#include "holds/oracles.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "holds/error.hpp"

namespace holds {

void validate(const SmallInstance& inst) {
  const auto& net = inst.network;
  if (inst.horizon < 1) throw Error(ErrorKind::ConfigError, "horizon must be at least 1");
  if (net.reward.size() != net.patron_classes() || net.compatible.size() != net.patron_classes())
    throw Error(ErrorKind::ConfigError, "patron class arrays have mismatched lengths");
  double total_rate = 0.0;
  for (std::size_t j = 0; j < net.patron_classes(); ++j) {
    if (!(net.rate[j] >= 0.0 && net.rate[j] <= 1.0))
      throw Error(ErrorKind::ConfigError, "patron rate outside [0,1]");
    if (!(net.reward[j] >= 0.0)) throw Error(ErrorKind::ConfigError, "negative reward");
    for (std::size_t a : net.compatible[j])
      if (a >= net.copy_classes())
        throw Error(ErrorKind::ConfigError, "compatibility index out of range");
    total_rate += net.rate[j];
  }
  if (total_rate > 1.0 + 1e-12)
    throw Error(ErrorKind::ConfigError, "patron rates sum above 1");
  std::int64_t states = 1;
  for (auto c : net.capacity) {
    if (c < 0) throw Error(ErrorKind::ConfigError, "negative capacity");
    states *= (c + 1);
    if (states * inst.horizon > kMaxStateSpace)
      throw Error(ErrorKind::StateSpaceTooLarge,
                  "state space exceeds " + std::to_string(kMaxStateSpace));
  }
}

ValueTable::ValueTable(std::vector<std::int32_t> capacity, int horizon)
    : capacity_(std::move(capacity)), horizon_(horizon) {
  strides_.resize(capacity_.size());
  for (std::size_t a = 0; a < capacity_.size(); ++a) {
    strides_[a] = state_count_;
    state_count_ *= static_cast<std::size_t>(capacity_[a]) + 1;
  }
  layers_.assign(static_cast<std::size_t>(horizon) + 1, std::vector<double>(state_count_, 0.0));
}

std::size_t ValueTable::encode(std::span<const std::int32_t> x) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < x.size(); ++a) idx += static_cast<std::size_t>(x[a]) * strides_[a];
  return idx;
}

std::vector<std::int32_t> ValueTable::decode(std::size_t index) const {
  std::vector<std::int32_t> x(capacity_.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    x[a] = static_cast<std::int32_t>(index % (static_cast<std::size_t>(capacity_[a]) + 1));
    index /= static_cast<std::size_t>(capacity_[a]) + 1;
  }
  return x;
}

namespace {

// Advances a mixed-radix counter; returns false after the last state.
bool next_state(std::vector<std::int32_t>& x, const std::vector<std::int32_t>& cap) {
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] < cap[a]) {
      ++x[a];
      return true;
    }
    x[a] = 0;
  }
  return false;
}

template <class StateFn>
ValueTable backward(const SmallInstance& inst, StateFn&& per_state) {
  validate(inst);
  const auto& cap = inst.network.capacity;
  ValueTable table(cap, inst.horizon);
  for (int t = inst.horizon; t >= 1; --t) {
    const auto& next = table.layer(t + 1);
    auto& cur = table.layer(t);
    std::vector<std::int32_t> x(cap.size(), 0);
    std::size_t idx = 0;
    do {
      cur[idx] = per_state(t, x, idx, next, table);
      ++idx;
    } while (next_state(x, cap));
  }
  return table;
}

}  // namespace

ValueTable solve_dp(const SmallInstance& inst) {
  const auto& net = inst.network;
  return backward(inst, [&](int, const std::vector<std::int32_t>& x, std::size_t idx,
                            const std::vector<double>& next, const ValueTable& table) {
    const double stay = next[idx];
    double gain = 0.0;
    for (std::size_t j = 0; j < net.patron_classes(); ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a : net.compatible[j])
        if (x[a] > 0) best = std::max(best, next[idx - table.stride(a)]);
      if (best == -std::numeric_limits<double>::infinity()) continue;
      gain += net.rate[j] * std::max(0.0, net.reward[j] + best - stay);
    }
    return stay + gain;
  });
}

ValueTable solve_dp_explicit_reject(const SmallInstance& inst) {
  const auto& net = inst.network;
  return backward(inst, [&](int, const std::vector<std::int32_t>& x, std::size_t idx,
                            const std::vector<double>& next, const ValueTable& table) {
    const double stay = next[idx];
    double value = 0.0;
    double served_mass = 0.0;
    for (std::size_t j = 0; j < net.patron_classes(); ++j) {
      bool stocked = false;
      double best = stay;  // reject
      for (std::size_t a : net.compatible[j]) {
        if (x[a] <= 0) continue;
        stocked = true;
        best = std::max(best, net.reward[j] + next[idx - table.stride(a)]);
      }
      if (!stocked) continue;
      value += net.rate[j] * best;
      served_mass += net.rate[j];
    }
    return value + (1.0 - served_mass) * stay;
  });
}

ValueTable policy_values(const SmallInstance& inst, const GammaTable& gammas) {
  const auto& net = inst.network;
  if (gammas.horizon() != inst.horizon || gammas.class_count() != net.copy_classes())
    throw Error(ErrorKind::ConfigError, "gamma table does not match the instance");
  return backward(inst, [&](int t, const std::vector<std::int32_t>& x, std::size_t idx,
                            const std::vector<double>& next, const ValueTable& table) {
    const double stay = next[idx];
    double value = 0.0;
    double served_mass = 0.0;
    for (std::size_t j = 0; j < net.patron_classes(); ++j) {
      auto pick = decide_near_optimal(gammas, x, t, net.compatible[j], net.reward[j]);
      if (!pick) continue;
      value += net.rate[j] * (net.reward[j] + next[idx - table.stride(*pick)]);
      served_mass += net.rate[j];
    }
    return value + (1.0 - served_mass) * stay;
  });
}

double policy_value(const SmallInstance& inst, const GammaTable& gammas) {
  return policy_values(inst, gammas).start_value();
}

namespace {

// Residual graph for the priority max-flow. Node 0 is the source, patrons
// are 1..P, copy classes P+1..P+A, the sink is last.
class FlowGraph {
 public:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
  };

  explicit FlowGraph(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double cap) {
    adj_[from].push_back({to, adj_[to].size(), cap});
    adj_[to].push_back({from, adj_[from].size() - 1, 0.0});
    return adj_[from].size() - 1;
  }

  // Pushes as much flow as possible from `start` to `sink`, limited by
  // `budget`. Returns the amount pushed.
  double augment_from(std::size_t start, std::size_t sink, double budget) {
    constexpr double kEps = 1e-13;
    double pushed = 0.0;
    const std::size_t n = adj_.size();
    std::vector<std::size_t> parent_node(n), parent_edge(n);
    while (budget - pushed > kEps) {
      std::vector<bool> seen(n, false);
      std::deque<std::size_t> queue{start};
      seen[start] = true;
      while (!queue.empty() && !seen[sink]) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t e = 0; e < adj_[u].size(); ++e) {
          const auto& edge = adj_[u][e];
          // Never route back through the source: earlier classes keep their totals.
          if (edge.to == 0 || seen[edge.to] || edge.cap <= kEps) continue;
          seen[edge.to] = true;
          parent_node[edge.to] = u;
          parent_edge[edge.to] = e;
          queue.push_back(edge.to);
        }
      }
      if (!seen[sink]) break;
      double bottleneck = budget - pushed;
      for (std::size_t v = sink; v != start; v = parent_node[v])
        bottleneck = std::min(bottleneck, adj_[parent_node[v]][parent_edge[v]].cap);
      for (std::size_t v = sink; v != start; v = parent_node[v]) {
        auto& edge = adj_[parent_node[v]][parent_edge[v]];
        edge.cap -= bottleneck;
        adj_[v][edge.rev].cap += bottleneck;
      }
      pushed += bottleneck;
    }
    return pushed;
  }

 private:
  std::vector<std::vector<Edge>> adj_;
};

}  // namespace

double lp_bound(const SmallInstance& inst) {
  validate(inst);
  const auto& net = inst.network;
  const std::size_t patrons = net.patron_classes();
  const std::size_t copies = net.copy_classes();
  const std::size_t sink = patrons + copies + 1;
  FlowGraph graph(sink + 1);
  const double unbounded = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < patrons; ++j)
    for (std::size_t a : net.compatible[j]) graph.add_edge(1 + j, 1 + patrons + a, unbounded);
  for (std::size_t a = 0; a < copies; ++a)
    graph.add_edge(1 + patrons + a, sink, static_cast<double>(net.capacity[a]));

  std::vector<std::size_t> order(patrons);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return net.reward[a] > net.reward[b]; });
  double total = 0.0;
  for (std::size_t j : order) {
    if (net.reward[j] <= 0.0) break;
    double demand = inst.horizon * net.rate[j];
    if (demand <= 0.0) continue;
    total += net.reward[j] * graph.augment_from(1 + j, sink, demand);
  }
  return total;
}

OracleReport evaluate_oracles(const SmallInstance& inst) {
  OracleReport r;
  r.dp = solve_dp(inst).start_value();
  r.lp = lp_bound(inst);
  auto gammas = compute_gammas(inst.network, inst.horizon);
  r.approx = approx_value(gammas, inst.network.capacity, 1);
  r.policy = policy_value(inst, gammas);
  return r;
}

}  // namespace holds
