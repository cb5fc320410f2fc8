#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "holds/fulfillment.hpp"
#include "holds/model.hpp"
#include "holds/rng.hpp"

namespace holds {

struct SimConfig {
  int replications = 10;
  std::uint64_t master_seed = 0;
  // Days measured after warm-up; 0 means the scenario's sim_days.
  int measure_days = 0;
  // Worker threads; 0 means default_workers(). Never affects results.
  std::size_t workers = 0;
};

// Flow quantities are accumulated in fixed point so that sums are exact and
// independent of reduction order.
inline constexpr int kFlowFractionBits = 32;
std::int64_t to_fixed(double value);
double from_fixed(std::int64_t value);

// Raw totals for one replication.
struct ReplicationMetrics {
  std::vector<std::int64_t> co_browse;     // per branch
  std::vector<std::int64_t> co_hold;       // per branch
  std::vector<std::int32_t> availability;  // [branch * titles + title], days on shelf
  std::vector<std::int64_t> flow;          // [source * branches + destination], fixed point
  std::int64_t hold_requests = 0;
  std::int64_t rejected_holds = 0;
  std::int64_t browse_requests = 0;
  std::int64_t rejected_browses = 0;

  ReplicationMetrics() = default;
  ReplicationMetrics(std::size_t branches, std::size_t titles);
  void merge_counts(const ReplicationMetrics& other);
  std::int64_t checkouts(std::size_t branch) const { return co_browse[branch] + co_hold[branch]; }
};

// Means over replications.
struct SimMetrics {
  std::size_t branches = 0;
  std::size_t titles = 0;
  int measure_days = 0;
  std::vector<double> co_browse;
  std::vector<double> co_hold;
  std::vector<double> availability;  // [branch * titles + title]
  std::vector<double> flow;          // [source * branches + destination], desirability weighted
  double rejected_holds = 0.0;
  double hold_requests = 0.0;

  double checkouts(std::size_t i) const { return co_browse[i] + co_hold[i]; }
  double days_available(std::size_t i, std::size_t l) const { return availability[i * titles + l]; }
};

struct SimResult {
  SimMetrics mean;
  std::vector<ReplicationMetrics> replications;
};

// Snapshot handed to an audit hook at the end of every simulated day.
struct DayAudit {
  int replication = 0;
  std::size_t title = 0;
  int day = 0;
  std::span<const std::int32_t> on_shelf;  // per copy class
  std::size_t outstanding_loans = 0;
  std::int64_t initial_copies = 0;
  const ReplicationMetrics* running = nullptr;  // this task's accumulated totals
};
using AuditHook = std::function<void(const DayAudit&)>;

// Initial shelf per copy class for one title: Reserve ~ Binomial(c, beta_i).
std::vector<std::int32_t> init_reserves(const Scenario& scenario, TitleId title,
                                        std::span<const double> beta, Rng& rng);

// Runs every replication. NearOptimal needs `rewards`; Tiered needs the
// policy's tier assignment. Throws ConfigError otherwise. An audit hook
// forces single-threaded execution.
SimResult run(const Scenario& scenario, const PolicySpec& policy, const SimConfig& config,
              const std::optional<RewardVector>& rewards = std::nullopt,
              const AuditHook& audit = {});

// Runs NearOptimal for the warm-up of replication 0, then builds gamma tables
// from the shelf at that point and derives the static tiers.
TierAssignment derive_policy_tiers(const Scenario& scenario, std::span<const double> beta,
                                   const RewardVector& rewards, const SimConfig& config);

// Converts a NearOptimal policy into the Tiered policy it approximates.
PolicySpec tierify(const Scenario& scenario, const PolicySpec& near_optimal,
                   const RewardVector& rewards, const SimConfig& config);

// Denominators of the objectives: checkouts under (beta = 0, NearOptimal with
// uniform rewards) and collection quality under beta = 1.
struct Baselines {
  std::vector<double> co;
  std::vector<double> cq;
  std::uint64_t seed = 0;
  int replications = 0;
  int measure_days = 0;
};

Baselines freeze_baselines(const Scenario& scenario, const SimConfig& config);

// CQ_i = sum_l d_l * D[i][l] of mean metrics.
std::vector<double> collection_quality(const SimMetrics& metrics, const Scenario& scenario);
std::vector<double> collection_quality(const ReplicationMetrics& metrics, const Scenario& scenario);

}  // namespace holds
