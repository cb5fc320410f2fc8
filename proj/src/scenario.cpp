#include "holds/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "holds/error.hpp"
#include "holds/rng.hpp"

namespace holds {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct BranchDraws {
  std::vector<double> income;
  std::vector<double> demand;
  std::vector<double> hold;
};

BranchDraws draw_branches(const GeneratorConfig& c, Rng& rng) {
  const auto n = static_cast<std::size_t>(c.branch_count);
  BranchDraws b;
  b.income.resize(n);
  b.demand.resize(n);
  b.hold.resize(n);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> demand(c.demand_low, c.demand_high);
  for (std::size_t i = 0; i < n; ++i) {
    b.income[i] = normal(rng);
    double noise = normal(rng);
    double latent = c.hold_corr * b.income[i] + std::sqrt(1.0 - c.hold_corr * c.hold_corr) * noise;
    b.hold[i] = c.hold_low + (c.hold_high - c.hold_low) * normal_cdf(latent);
    b.demand[i] = demand(rng);
  }
  return b;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t m = k;
    while (m + 1 < order.size() && v[order[m + 1]] == v[order[k]]) ++m;
    double r = 0.5 * static_cast<double>(k + m);
    for (std::size_t q = k; q <= m; ++q) rank[order[q]] = r;
    k = m + 1;
  }
  return rank;
}

}  // namespace

void validate(const GeneratorConfig& c) {
  if (c.branch_count < 1 || c.title_count < 1) bad("branch_count and title_count must be positive");
  if (!(c.demand_low > 0.0 && c.demand_low <= c.demand_high && c.demand_high <= 1.0))
    bad("demand bounds must satisfy 0 < low <= high <= 1");
  if (!(c.hold_low >= 0.0 && c.hold_low <= c.hold_high && c.hold_high <= 1.0))
    bad("hold bounds must satisfy 0 <= low <= high <= 1");
  if (!(c.hold_corr >= -1.0 && c.hold_corr <= 1.0)) bad("hold_corr must lie in [-1, 1]");
  if (!(c.desirability_alpha > 0.0 && c.desirability_beta > 0.0))
    bad("desirability shape parameters must be positive");
  if (!(c.copies_mean > 0.0)) bad("copies_mean must be positive");
  if (c.availability_min_branches < 0) bad("availability_min_branches must be non-negative");
  if (!(c.calibration_scale > 0.0)) bad("calibration_scale must be positive");
  if (c.loan_days < 1 || c.warmup_days < 0 || c.sim_days < 1) bad("invalid day counts");
}

std::vector<double> income_scores(const GeneratorConfig& config) {
  validate(config);
  Rng rng = make_rng(config.seed, 0, 0, Stream::Generator);
  return draw_branches(config, rng).income;
}

Scenario generate(const GeneratorConfig& c) {
  validate(c);
  Rng rng = make_rng(c.seed, 0, 0, Stream::Generator);
  const auto n = static_cast<std::size_t>(c.branch_count);
  auto draws = draw_branches(c, rng);

  Scenario s;
  s.loan_days = c.loan_days;
  s.warmup_days = c.warmup_days;
  s.sim_days = c.sim_days;
  s.calibration_scale = c.calibration_scale;

  // Label branches by income quartile for downstream grouping.
  auto rank = average_ranks(draws.income);
  for (std::size_t i = 0; i < n; ++i) {
    int quartile = 1 + static_cast<int>(4.0 * rank[i] / static_cast<double>(n));
    s.branches.push_back({draws.demand[i], draws.hold[i], "income-q" + std::to_string(std::min(quartile, 4))});
  }
  s.inventory.assign(n, {});

  const double mean_demand =
      std::accumulate(draws.demand.begin(), draws.demand.end(), 0.0) / static_cast<double>(n);
  std::gamma_distribution<double> shape_a(c.desirability_alpha, 1.0);
  std::gamma_distribution<double> shape_b(c.desirability_beta, 1.0);
  std::vector<std::poisson_distribution<int>> copies;
  for (std::size_t i = 0; i < n; ++i)
    copies.emplace_back(c.copies_mean * draws.demand[i] / mean_demand);

  const long max_candidates = 20L * c.title_count;
  std::vector<std::int32_t> column(n);
  for (long k = 0; k < max_candidates && static_cast<int>(s.titles.size()) < c.title_count; ++k) {
    double x = shape_a(rng), y = shape_b(rng);
    double d = x / (x + y);
    d = std::clamp(d, 1e-6, 1.0);
    int stocked = 0;
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = copies[i](rng);
      stocked += column[i] > 0;
    }
    if (stocked == 0 || stocked < c.availability_min_branches) continue;
    s.titles.push_back({d});
    for (std::size_t i = 0; i < n; ++i) s.inventory[i].push_back(column[i]);
  }
  if (s.titles.empty())
    throw Error(ErrorKind::EmptyScenario,
                "no title is stocked at " + std::to_string(c.availability_min_branches) +
                    " or more branches");
  validate(s);
  return s;
}

double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace holds
