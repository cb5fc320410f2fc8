#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "holds/model.hpp"
#include "holds/simulator.hpp"

namespace holds {

struct UsageResult {
  double f = 0.0;
  std::vector<double> ratio;
};

// ratio_i = CO_i / baseline_i; f = sum p_i ratio_i / sum p_i.
UsageResult usage_objective(std::span<const double> checkouts, std::span<const double> baseline_co,
                            std::span<const double> demand);

struct BrowserResult {
  double g = 0.0;
  double g_nash = 0.0;
  std::vector<double> ratio;
};

// ratio_i = CQ_i / baseline_i; g weights ratios by (1 - h_i); g_nash is the
// unweighted geometric mean.
BrowserResult browser_objective(std::span<const double> collection_quality,
                                std::span<const double> baseline_cq,
                                std::span<const double> hold_fraction);

// inflow_i = received from other branches - shipped to other branches.
// `flow` is [source * n + destination].
std::vector<double> net_inflow(std::span<const double> flow, std::size_t branches);
std::vector<std::int64_t> net_inflow_fixed(std::span<const std::int64_t> flow, std::size_t branches);

struct ObjectivePoint {
  double f = 0.0;
  double g = 0.0;
  double g_nash = 0.0;
  std::vector<double> usage_ratio;
  std::vector<double> quality_ratio;
  std::vector<double> net_inflow;
  // Per-replication objective values against the same baselines.
  std::vector<double> f_replications;
  std::vector<double> g_replications;
  double rejected_holds = 0.0;

  double f_standard_error() const;
  double g_standard_error() const;
};

ObjectivePoint evaluate(const SimResult& result, const Baselines& baselines, const Scenario& scenario);

}  // namespace holds
