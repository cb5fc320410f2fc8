#include "holds/objectives.hpp"

#include <cmath>
#include <string>

#include "holds/error.hpp"

namespace holds {

namespace {

void require_positive(std::span<const double> baseline, const char* what) {
  for (std::size_t i = 0; i < baseline.size(); ++i)
    if (!(baseline[i] > 0.0))
      throw Error(ErrorKind::ZeroBaseline,
                  std::string(what) + " baseline is zero at branch " + std::to_string(i));
}

void require_sizes(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || b != c) throw Error(ErrorKind::ConfigError, "objective inputs have mismatched lengths");
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

UsageResult usage_objective(std::span<const double> checkouts, std::span<const double> baseline_co,
                            std::span<const double> demand) {
  require_sizes(checkouts.size(), baseline_co.size(), demand.size());
  require_positive(baseline_co, "checkout");
  UsageResult out;
  out.ratio.resize(checkouts.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < checkouts.size(); ++i) {
    out.ratio[i] = checkouts[i] / baseline_co[i];
    num += demand[i] * out.ratio[i];
    den += demand[i];
  }
  out.f = num / den;
  return out;
}

BrowserResult browser_objective(std::span<const double> cq, std::span<const double> baseline_cq,
                                std::span<const double> hold_fraction) {
  require_sizes(cq.size(), baseline_cq.size(), hold_fraction.size());
  require_positive(baseline_cq, "collection quality");
  BrowserResult out;
  out.ratio.resize(cq.size());
  double num = 0.0, den = 0.0, log_sum = 0.0;
  for (std::size_t i = 0; i < cq.size(); ++i) {
    out.ratio[i] = cq[i] / baseline_cq[i];
    const double w = 1.0 - hold_fraction[i];
    num += w * out.ratio[i];
    den += w;
    log_sum += std::log(out.ratio[i]);
  }
  // All-hold systems have no browsers to weigh; fall back to a plain mean.
  if (den > 0.0) {
    out.g = num / den;
  } else {
    double s = 0.0;
    for (double r : out.ratio) s += r;
    out.g = s / static_cast<double>(out.ratio.size());
  }
  out.g_nash = std::exp(log_sum / static_cast<double>(cq.size()));
  // exp(log) loses the exact value of 1 only through rounding; keep the
  // anchor exact when every ratio is exactly 1.
  bool all_one = true;
  for (double r : out.ratio) all_one = all_one && r == 1.0;
  if (all_one) out.g_nash = 1.0;
  return out;
}

std::vector<double> net_inflow(std::span<const double> flow, std::size_t n) {
  std::vector<double> inflow(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      in += flow[k * n + i];
      out += flow[i * n + k];
    }
    inflow[i] = in - out;
  }
  return inflow;
}

std::vector<std::int64_t> net_inflow_fixed(std::span<const std::int64_t> flow, std::size_t n) {
  std::vector<std::int64_t> inflow(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) inflow[i] += flow[k * n + i] - flow[i * n + k];
  return inflow;
}

double ObjectivePoint::f_standard_error() const { return standard_error(f_replications); }
double ObjectivePoint::g_standard_error() const { return standard_error(g_replications); }

ObjectivePoint evaluate(const SimResult& result, const Baselines& baselines, const Scenario& scenario) {
  const std::size_t n = scenario.branch_count();
  std::vector<double> demand(n), hold(n);
  for (std::size_t i = 0; i < n; ++i) {
    demand[i] = scenario.branches[i].demand_size;
    hold[i] = scenario.branches[i].hold_fraction;
  }
  std::vector<double> co(n);
  for (std::size_t i = 0; i < n; ++i) co[i] = result.mean.checkouts(i);
  auto usage = usage_objective(co, baselines.co, demand);
  auto browser = browser_objective(collection_quality(result.mean, scenario), baselines.cq, hold);

  ObjectivePoint p;
  p.f = usage.f;
  p.g = browser.g;
  p.g_nash = browser.g_nash;
  p.usage_ratio = std::move(usage.ratio);
  p.quality_ratio = std::move(browser.ratio);
  // Exact zero-sum inflows from the integer totals, then scaled to means.
  std::vector<std::int64_t> flow_total(n * n, 0);
  for (const auto& r : result.replications)
    for (std::size_t k = 0; k < flow_total.size(); ++k) flow_total[k] += r.flow[k];
  auto fixed = net_inflow_fixed(flow_total, n);
  p.net_inflow.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    p.net_inflow[i] = from_fixed(fixed[i]) / static_cast<double>(result.replications.size());
  p.rejected_holds = result.mean.rejected_holds;

  for (const auto& r : result.replications) {
    std::vector<double> rep_co(n);
    for (std::size_t i = 0; i < n; ++i) rep_co[i] = static_cast<double>(r.checkouts(i));
    p.f_replications.push_back(usage_objective(rep_co, baselines.co, demand).f);
    p.g_replications.push_back(
        browser_objective(collection_quality(r, scenario), baselines.cq, hold).g);
  }
  return p;
}

}  // namespace holds
