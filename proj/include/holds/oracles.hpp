#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "holds/fulfillment.hpp"

namespace holds {

// A small single-title instance on which the exact recursions are tractable.
struct SmallInstance {
  Network network;
  int horizon = 1;
};

// Largest admissible (number of inventory states) * horizon.
inline constexpr std::int64_t kMaxStateSpace = 10'000'000;

// Checks rates, rewards, compatibility indices and the state-space guard.
// Throws ConfigError or StateSpaceTooLarge.
void validate(const SmallInstance& inst);

// Exact values over every inventory vector x <= c, for t = 1..T+1.
// States are mixed-radix encoded with radix c_a + 1.
class ValueTable {
 public:
  ValueTable(std::vector<std::int32_t> capacity, int horizon);

  double value(int t, std::span<const std::int32_t> x) const { return layers_[t - 1][encode(x)]; }
  double start_value() const { return layers_[0].back(); }

  std::size_t state_count() const { return state_count_; }
  int horizon() const { return horizon_; }
  std::size_t encode(std::span<const std::int32_t> x) const;
  std::vector<std::int32_t> decode(std::size_t index) const;
  std::size_t stride(std::size_t a) const { return strides_[a]; }

  std::vector<double>& layer(int t) { return layers_[t - 1]; }
  const std::vector<double>& layer(int t) const { return layers_[t - 1]; }

 private:
  std::vector<std::int32_t> capacity_;
  std::vector<std::size_t> strides_;
  std::size_t state_count_ = 1;
  int horizon_ = 0;
  std::vector<std::vector<double>> layers_;  // t = 1..T+1
};

// Backward induction of the usage-optimal recursion
// V_t(x) = V_{t+1}(x) + sum_j lambda_j 1[stock] (r_j + max_a V_{t+1}(x - e_a) - V_{t+1}(x))^+.
ValueTable solve_dp(const SmallInstance& inst);

// The same recursion written with an explicit serve-or-reject max and a
// no-arrival term; used to confirm both forms agree.
ValueTable solve_dp_explicit_reject(const SmallInstance& inst);

// Fluid LP upper bound, solved exactly by routing patron classes in
// descending reward order through augmenting paths.
double lp_bound(const SmallInstance& inst);

// Exact expected reward R_1(c) of the near-optimal policy driven by `gammas`.
ValueTable policy_values(const SmallInstance& inst, const GammaTable& gammas);
double policy_value(const SmallInstance& inst, const GammaTable& gammas);

struct OracleReport {
  double dp = 0.0;      // V_1(c)
  double lp = 0.0;
  double approx = 0.0;  // H_1(c)
  double policy = 0.0;  // R_1(c)
};

OracleReport evaluate_oracles(const SmallInstance& inst);

}  // namespace holds
