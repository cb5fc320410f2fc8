#pragma once

#include <cstdint>
#include <vector>

#include "holds/model.hpp"

namespace holds {

// Knobs of the synthetic scenario generator.
struct GeneratorConfig {
  int branch_count = 50;
  int title_count = 500;
  std::uint64_t seed = 7;
  double demand_low = 0.2;   // p_i ~ U[demand_low, demand_high]
  double demand_high = 1.0;
  double hold_low = 0.15;    // h_i spans [hold_low, hold_high]
  double hold_high = 0.75;
  double hold_corr = 0.7;    // coupling of h_i to the branch income score
  double desirability_alpha = 2.0;  // d_l ~ Beta(alpha, beta)
  double desirability_beta = 3.0;
  double copies_mean = 1.0;  // mean copies per (branch, title), scaled by p_i
  int availability_min_branches = 20;
  double calibration_scale = 0.03;
  int loan_days = 21;
  int warmup_days = 100;
  int sim_days = 365;
};

// Throws ConfigError for out-of-range knobs.
void validate(const GeneratorConfig& config);

// Draws a scenario. Candidate titles are drawn until `title_count` of them
// are stocked at >= availability_min_branches branches (or 20x that many
// candidates were tried). Throws EmptyScenario if none survive.
Scenario generate(const GeneratorConfig& config);

// Income score per branch used for the hold-fraction coupling; regenerated
// deterministically from the same config.
std::vector<double> income_scores(const GeneratorConfig& config);

// Spearman rank correlation; average ranks on ties.
double rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace holds
