#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "holds/model.hpp"

namespace holds {

// A single-title flexible fulfillment network: copy classes with
// capacities, patron classes with arrival probability, reward and the copy
// classes they accept. Indices are flat.
struct Network {
  std::vector<std::int32_t> capacity;
  std::vector<double> rate;
  std::vector<double> reward;
  std::vector<std::vector<std::size_t>> compatible;

  std::size_t copy_classes() const { return capacity.size(); }
  std::size_t patron_classes() const { return rate.size(); }
};

// Builds the library network for one title: 2*B copy classes, 2*B patron
// classes, compatibility from `holds::compatibility`.
Network library_network(std::span<const double> title_rates, std::span<const std::int32_t> capacity,
                        std::span<const double> rewards);

// Per-copy expected-reward coefficients gamma[a][t] for t = 1..T+1, with
// gamma[a][T+1] = 0. Stored t-major so a decision at fixed t scans one row.
class GammaTable {
 public:
  GammaTable() = default;
  GammaTable(std::size_t classes, int horizon)
      : classes_(classes), horizon_(horizon), values_(classes * static_cast<std::size_t>(horizon + 1), 0.0) {}

  double at(std::size_t a, int t) const { return values_[row(t) + a]; }
  double& at(std::size_t a, int t) { return values_[row(t) + a]; }
  std::span<const double> period(int t) const { return {values_.data() + row(t), classes_}; }

  std::size_t class_count() const { return classes_; }
  int horizon() const { return horizon_; }

  // Capacities the table was built from, and the day its window started.
  std::vector<std::int32_t> capacities;
  std::int64_t window_start = 0;

 private:
  std::size_t row(int t) const { return static_cast<std::size_t>(t - 1) * classes_; }

  std::size_t classes_ = 0;
  int horizon_ = 0;
  std::vector<double> values_;
};

// Coefficient recursion over t = T..1 for an arbitrary network. Classes with
// zero capacity are never selected and keep gamma = 0.
GammaTable compute_gammas(const Network& network, int horizon);

// Same recursion specialised to the library structure: every hold class
// shares one compatibility set, so the best Open class is found once per
// period. Produces bit-identical values to `compute_gammas` on
// `library_network(...)`. Reuses `out`'s storage.
void compute_library_gammas(std::span<const double> title_rates,
                            std::span<const std::int32_t> capacity,
                            std::span<const double> rewards, int horizon, GammaTable& out);

// H_t(x) = sum_a gamma[a][t] * x_a.
double approx_value(const GammaTable& gammas, std::span<const std::int32_t> x, int t);

// Serve the stocked compatible class with the smallest gamma[., t+1] iff the
// reward covers it. Ties go to the larger shelf, then the lowest flat index.
std::optional<std::size_t> decide_near_optimal(const GammaTable& gammas,
                                               std::span<const std::int32_t> x, int t,
                                               std::span<const std::size_t> compatible,
                                               double reward);

struct RewardVector {
  std::vector<double> r;  // per patron flat index

  static RewardVector uniform(std::size_t branch_count, double value = 1.0) {
    return {std::vector<double>(2 * branch_count, value)};
  }
};

// Library-structured decision for patron class `j`.
std::optional<CopyClass> decide_near_optimal(const GammaTable& gammas,
                                             std::span<const std::int32_t> x, int t, PatronClass j,
                                             const RewardVector& rewards);

// Rewards aligned with the usage objective: both classes at branch i get
// (p_i / sum p) / baseline_co[i], rescaled so the largest is 1.
RewardVector usage_rewards(const Scenario& scenario, std::span<const double> baseline_co);

struct TierAssignment {
  std::vector<int> tier;                     // 1, 2 or 3 per branch
  std::vector<double> average_unit_reward;   // +inf for branches with no stocked title
};

// Sizes of tiers 1..3 for n branches; extras go to lower-numbered tiers.
std::vector<std::size_t> tier_sizes(std::size_t branch_count);

// open_gamma[title][branch] = gamma of the (branch, Open) class at t = 1;
// open_stock[title][branch] = Open copies used to build that table.
TierAssignment derive_tiers(const std::vector<std::vector<double>>& open_gamma,
                            const std::vector<std::vector<std::int32_t>>& open_stock);

// Tiered paging: scan tier 1, 2, 3; inside a tier take the branch with the
// most Open copies (lowest index on ties). With `local_first` the patron's
// own Open pool is tried before tier 1. Browse classes are served from their
// Reserve pool first, then the local Open pool.
std::optional<CopyClass> decide_tiered(std::span<const int> tiers, std::span<const std::int32_t> x,
                                       PatronClass j, bool local_first);

// Reserve-first local service used for browsers outside NearOptimal.
std::optional<CopyClass> serve_browser_local(std::span<const std::int32_t> x, BranchId branch);

}  // namespace holds
