#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holds/model.hpp"
#include "holds/objectives.hpp"
#include "holds/simulator.hpp"

namespace holds {

struct NamedPolicy {
  std::string name;
  PolicySpec policy;
};

struct ComparisonRow {
  std::string name;
  ObjectivePoint point;
};

// Evaluates every policy with the same seed and replication count. NearOptimal
// policies use usage-aligned rewards unless `uniform_rewards` is set.
std::vector<ComparisonRow> compare(const Scenario& scenario, const Baselines& baselines,
                                   const std::vector<NamedPolicy>& policies, const SimConfig& config,
                                   bool uniform_rewards = false);

// The four canonical policies: (beta=0, RandomAvailable), (beta=0,
// NearOptimal), (balanced beta, Tiered) and the same tiers with beta=0.
std::vector<NamedPolicy> canonical_policies(const Scenario& scenario, const Baselines& baselines,
                                            const std::vector<double>& balanced_beta,
                                            const SimConfig& config);

// Entry point of the command-line tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace holds
