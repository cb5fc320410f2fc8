#include "holds/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <queue>
#include <string>
#include <utility>

#include "holds/error.hpp"
#include "holds/parallel.hpp"

namespace holds {

std::int64_t to_fixed(double value) { return std::llround(std::ldexp(value, kFlowFractionBits)); }
double from_fixed(std::int64_t value) {
  return std::ldexp(static_cast<double>(value), -kFlowFractionBits);
}

ReplicationMetrics::ReplicationMetrics(std::size_t branches, std::size_t titles)
    : co_browse(branches, 0),
      co_hold(branches, 0),
      availability(branches * titles, 0),
      flow(branches * branches, 0) {}

void ReplicationMetrics::merge_counts(const ReplicationMetrics& o) {
  for (std::size_t i = 0; i < co_browse.size(); ++i) {
    co_browse[i] += o.co_browse[i];
    co_hold[i] += o.co_hold[i];
  }
  for (std::size_t k = 0; k < flow.size(); ++k) flow[k] += o.flow[k];
  hold_requests += o.hold_requests;
  rejected_holds += o.rejected_holds;
  browse_requests += o.browse_requests;
  rejected_browses += o.rejected_browses;
}

std::vector<std::int32_t> init_reserves(const Scenario& scenario, TitleId title,
                                        std::span<const double> beta, Rng& rng) {
  const std::size_t branches = scenario.branch_count();
  std::vector<std::int32_t> shelf(2 * branches, 0);
  for (std::size_t i = 0; i < branches; ++i) {
    const auto copies = static_cast<std::int32_t>(scenario.copies(BranchId{i}, title));
    std::int32_t reserve = 0;
    if (copies > 0) {
      if (beta[i] >= 1.0) {
        reserve = copies;
      } else if (beta[i] > 0.0) {
        reserve = std::binomial_distribution<std::int32_t>(copies, beta[i])(rng);
      }
    }
    shelf[2 * i] = reserve;
    shelf[2 * i + 1] = copies - reserve;
  }
  return shelf;
}

namespace {

// Rates below this are treated as zero; over any simulated horizon they
// contribute no arrivals in practice and break the geometric sampler.
constexpr double kMinRate = 1e-12;

struct Loan {
  std::int32_t return_day;
  std::int32_t home_class;
};

struct Engine {
  const Scenario& scenario;
  PolicySpec policy;
  ArrivalRates rates;
  std::optional<RewardVector> rewards;
  std::vector<std::int64_t> fixed_desirability;
  std::uint64_t seed = 0;
  int warmup = 0;
  int loan_days = 21;

  Engine(const Scenario& s, PolicySpec p, std::optional<RewardVector> r, std::uint64_t master)
      : scenario(s),
        policy(std::move(p)),
        rates(arrival_rates(s)),
        rewards(std::move(r)),
        seed(master),
        warmup(s.warmup_days),
        loan_days(s.loan_days) {
    fixed_desirability.reserve(s.title_count());
    for (const auto& t : s.titles) fixed_desirability.push_back(to_fixed(t.desirability));
  }

  // Simulates days [0, days) of one title. Counts accumulate into `local`;
  // availability days go to `availability` (indexed [branch * titles + title]).
  void simulate_title(int rep, std::size_t title, int days, ReplicationMetrics& local,
                      std::vector<std::int32_t>* availability, const AuditHook* audit,
                      std::vector<std::int32_t>* final_shelf) const {
    const std::size_t branches = scenario.branch_count();
    const std::size_t titles = scenario.title_count();
    const std::vector<double> title_rates = rates.title_rates(TitleId{title});

    Rng reserve_rng = make_rng(seed, static_cast<std::uint64_t>(rep), title, Stream::Reserves);
    std::vector<std::int32_t> shelf = init_reserves(scenario, TitleId{title}, policy.beta, reserve_rng);
    std::int64_t initial_copies = 0;
    for (auto c : shelf) initial_copies += c;

    Rng arrivals = make_rng(seed, static_cast<std::uint64_t>(rep), title, Stream::Arrivals);
    Rng policy_rng = make_rng(seed, static_cast<std::uint64_t>(rep), title, Stream::Policy);

    // Arrival calendar: each patron class arrives on a day independently with
    // its rate, sampled as geometric gaps.
    using Entry = std::pair<std::int64_t, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> calendar;
    std::vector<std::geometric_distribution<std::int64_t>> gaps(title_rates.size());
    auto gap = [&](std::size_t j) -> std::int64_t {
      return title_rates[j] >= 1.0 ? 0 : gaps[j](arrivals);
    };
    for (std::size_t j = 0; j < title_rates.size(); ++j) {
      if (title_rates[j] < kMinRate) continue;
      if (title_rates[j] < 1.0) gaps[j] = std::geometric_distribution<std::int64_t>(title_rates[j]);
      std::int64_t first = gap(j);
      if (first < days) calendar.emplace(first, static_cast<std::uint32_t>(j));
    }

    const bool near_optimal = policy.fulfillment == FulfillmentMethod::NearOptimal;
    std::span<const int> tiers;
    if (policy.tier_assignment) tiers = *policy.tier_assignment;

    GammaTable gammas;
    std::deque<Loan> loans;
    std::vector<std::uint32_t> requests;
    std::vector<std::size_t> open_branches;
    std::vector<std::uint8_t> touched(branches, 0);
    std::vector<std::size_t> touched_list;
    std::vector<std::int32_t> available_since(branches, -1);
    for (std::size_t i = 0; i < branches; ++i)
      if (shelf[2 * i] + shelf[2 * i + 1] > 0) available_since[i] = 0;

    auto touch = [&](std::size_t i) {
      if (!touched[i]) {
        touched[i] = 1;
        touched_list.push_back(i);
      }
    };
    auto credit = [&](std::size_t i, int from, int to) {
      if (!availability) return;
      int lo = std::max(from, warmup);
      int hi = std::min(to, days - 1);
      if (hi >= lo) (*availability)[i * titles + title] += hi - lo + 1;
    };

    for (int day = 0; day < days; ++day) {
      while (!loans.empty() && loans.front().return_day == day) {
        ++shelf[static_cast<std::size_t>(loans.front().home_class)];
        touch(static_cast<std::size_t>(loans.front().home_class) / 2);
        loans.pop_front();
      }
      if (near_optimal && day % loan_days == 0)
        compute_library_gammas(title_rates, shelf, rewards->r, loan_days, gammas);

      requests.clear();
      while (!calendar.empty() && calendar.top().first == day) {
        std::uint32_t j = calendar.top().second;
        calendar.pop();
        requests.push_back(j);
        std::int64_t next = day + 1 + gap(j);
        if (next < days) calendar.emplace(next, j);
      }
      if (requests.size() > 1) std::shuffle(requests.begin(), requests.end(), arrivals);

      const int period = day % loan_days + 1;
      const bool measured = day >= warmup;
      for (std::uint32_t j : requests) {
        const PatronClass patron = PatronClass::from_flat(j);
        const bool hold = patron.mode == Mode::Hold;
        std::optional<CopyClass> pick;
        switch (policy.fulfillment) {
          case FulfillmentMethod::NearOptimal:
            pick = decide_near_optimal(gammas, shelf, period, patron, *rewards);
            break;
          case FulfillmentMethod::Tiered:
            pick = decide_tiered(tiers, shelf, patron, policy.local_first);
            break;
          case FulfillmentMethod::RandomAvailable:
            if (!hold) {
              pick = serve_browser_local(shelf, patron.branch);
            } else {
              open_branches.clear();
              for (std::size_t i = 0; i < branches; ++i)
                if (shelf[2 * i + 1] > 0) open_branches.push_back(i);
              if (!open_branches.empty()) {
                std::uniform_int_distribution<std::size_t> choose(0, open_branches.size() - 1);
                pick = CopyClass{BranchId{open_branches[choose(policy_rng)]}, Pool::Open};
              }
            }
            break;
        }
        if (measured) ++(hold ? local.hold_requests : local.browse_requests);
        if (!pick) {
          if (measured) ++(hold ? local.rejected_holds : local.rejected_browses);
          continue;
        }
        const std::size_t a = pick->flat();
        --shelf[a];
        loans.push_back({day + loan_days + 1, static_cast<std::int32_t>(a)});
        touch(pick->branch.index);
        if (measured) {
          ++(hold ? local.co_hold : local.co_browse)[patron.branch.index];
          if (hold && pick->branch != patron.branch)
            local.flow[pick->branch.index * branches + patron.branch.index] +=
                fixed_desirability[title];
        }
      }

      for (std::size_t i : touched_list) {
        touched[i] = 0;
        const bool on_shelf = shelf[2 * i] + shelf[2 * i + 1] > 0;
        if (on_shelf && available_since[i] < 0) {
          available_since[i] = day;
        } else if (!on_shelf && available_since[i] >= 0) {
          credit(i, available_since[i], day - 1);
          available_since[i] = -1;
        }
      }
      touched_list.clear();

      if (audit && *audit)
        (*audit)(DayAudit{rep, title, day, shelf, loans.size(), initial_copies, &local});
    }
    for (std::size_t i = 0; i < branches; ++i)
      if (available_since[i] >= 0) credit(i, available_since[i], days - 1);
    if (final_shelf) *final_shelf = std::move(shelf);
  }
};

std::optional<RewardVector> checked_rewards(const PolicySpec& policy, std::size_t branches,
                                            const std::optional<RewardVector>& rewards) {
  if (policy.fulfillment == FulfillmentMethod::NearOptimal && !rewards)
    throw Error(ErrorKind::ConfigError, "NearOptimal fulfillment requires a reward vector");
  if (rewards && rewards->r.size() != 2 * branches)
    throw Error(ErrorKind::ConfigError, "reward vector length != 2 * branch count");
  return rewards;
}

int measured_days(const Scenario& scenario, const SimConfig& config) {
  return config.measure_days > 0 ? config.measure_days : scenario.sim_days;
}

}  // namespace

SimResult run(const Scenario& scenario, const PolicySpec& raw_policy, const SimConfig& config,
              const std::optional<RewardVector>& rewards, const AuditHook& audit) {
  validate(scenario);
  if (config.replications < 1) throw Error(ErrorKind::ConfigError, "replications must be >= 1");
  const std::size_t branches = scenario.branch_count();
  const std::size_t titles = scenario.title_count();
  PolicySpec policy = normalized(raw_policy, branches);
  Engine engine(scenario, policy, checked_rewards(policy, branches, rewards), config.master_seed);

  const int measure = measured_days(scenario, config);
  const int days = scenario.warmup_days + measure;
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::size_t workers = config.workers ? config.workers : default_workers();
  if (audit) workers = 1;

  SimResult result;
  result.replications.assign(reps, ReplicationMetrics(branches, titles));
  const std::size_t chunk = std::max<std::size_t>(1, titles / std::max<std::size_t>(1, workers * 8));
  const std::size_t chunks = (titles + chunk - 1) / chunk;
  std::mutex merge_mutex;
  parallel_for(reps * chunks, workers, [&](std::size_t task) {
    const std::size_t rep = task / chunks;
    const std::size_t first = (task % chunks) * chunk;
    const std::size_t last = std::min(titles, first + chunk);
    ReplicationMetrics local(branches, 0);
    auto& target = result.replications[rep];
    for (std::size_t l = first; l < last; ++l)
      engine.simulate_title(static_cast<int>(rep), l, days, local, &target.availability,
                            audit ? &audit : nullptr, nullptr);
    std::lock_guard lock(merge_mutex);
    target.merge_counts(local);
  });

  auto& mean = result.mean;
  mean.branches = branches;
  mean.titles = titles;
  mean.measure_days = measure;
  const double inv = 1.0 / static_cast<double>(reps);
  mean.co_browse.assign(branches, 0.0);
  mean.co_hold.assign(branches, 0.0);
  mean.availability.assign(branches * titles, 0.0);
  mean.flow.assign(branches * branches, 0.0);
  for (std::size_t i = 0; i < branches; ++i) {
    std::int64_t browse = 0, hold = 0;
    for (const auto& r : result.replications) {
      browse += r.co_browse[i];
      hold += r.co_hold[i];
    }
    mean.co_browse[i] = static_cast<double>(browse) * inv;
    mean.co_hold[i] = static_cast<double>(hold) * inv;
  }
  for (std::size_t k = 0; k < branches * titles; ++k) {
    std::int64_t total = 0;
    for (const auto& r : result.replications) total += r.availability[k];
    mean.availability[k] = static_cast<double>(total) * inv;
  }
  for (std::size_t k = 0; k < branches * branches; ++k) {
    std::int64_t total = 0;
    for (const auto& r : result.replications) total += r.flow[k];
    mean.flow[k] = from_fixed(total) * inv;
  }
  std::int64_t rejected = 0, requests = 0;
  for (const auto& r : result.replications) {
    rejected += r.rejected_holds;
    requests += r.hold_requests;
  }
  mean.rejected_holds = static_cast<double>(rejected) * inv;
  mean.hold_requests = static_cast<double>(requests) * inv;
  return result;
}

TierAssignment derive_policy_tiers(const Scenario& scenario, std::span<const double> beta,
                                   const RewardVector& rewards, const SimConfig& config) {
  validate(scenario);
  const std::size_t branches = scenario.branch_count();
  const std::size_t titles = scenario.title_count();
  PolicySpec policy;
  policy.beta.assign(beta.begin(), beta.end());
  policy = normalized(std::move(policy), branches);
  Engine engine(scenario, policy, checked_rewards(policy, branches, rewards), config.master_seed);

  std::vector<std::vector<double>> open_gamma(titles, std::vector<double>(branches));
  std::vector<std::vector<std::int32_t>> open_stock(titles, std::vector<std::int32_t>(branches));
  std::size_t workers = config.workers ? config.workers : default_workers();
  parallel_for(titles, workers, [&](std::size_t l) {
    ReplicationMetrics scratch(branches, 0);
    std::vector<std::int32_t> shelf;
    engine.simulate_title(0, l, scenario.warmup_days, scratch, nullptr, nullptr, &shelf);
    GammaTable gammas;
    compute_library_gammas(engine.rates.title_rates(TitleId{l}), shelf, rewards.r,
                           scenario.loan_days, gammas);
    for (std::size_t i = 0; i < branches; ++i) {
      open_gamma[l][i] = gammas.at(2 * i + 1, 1);
      open_stock[l][i] = shelf[2 * i + 1];
    }
  });
  return derive_tiers(open_gamma, open_stock);
}

PolicySpec tierify(const Scenario& scenario, const PolicySpec& near_optimal,
                   const RewardVector& rewards, const SimConfig& config) {
  if (near_optimal.fulfillment != FulfillmentMethod::NearOptimal)
    throw Error(ErrorKind::ConfigError, "tierify expects a NearOptimal policy");
  auto tiers = derive_policy_tiers(scenario, near_optimal.beta, rewards, config);
  PolicySpec out = near_optimal;
  out.fulfillment = FulfillmentMethod::Tiered;
  out.tier_assignment = tiers.tier;
  return normalized(std::move(out), scenario.branch_count());
}

std::vector<double> collection_quality(const SimMetrics& m, const Scenario& scenario) {
  std::vector<double> cq(m.branches, 0.0);
  for (std::size_t i = 0; i < m.branches; ++i)
    for (std::size_t l = 0; l < m.titles; ++l)
      cq[i] += scenario.titles[l].desirability * m.days_available(i, l);
  return cq;
}

std::vector<double> collection_quality(const ReplicationMetrics& m, const Scenario& scenario) {
  const std::size_t branches = m.co_browse.size();
  const std::size_t titles = scenario.title_count();
  std::vector<double> cq(branches, 0.0);
  for (std::size_t i = 0; i < branches; ++i)
    for (std::size_t l = 0; l < titles; ++l)
      cq[i] += scenario.titles[l].desirability * m.availability[i * titles + l];
  return cq;
}

Baselines freeze_baselines(const Scenario& scenario, const SimConfig& config) {
  const std::size_t branches = scenario.branch_count();
  const auto uniform = RewardVector::uniform(branches);
  auto open = run(scenario, PolicySpec::uniform(branches, 0.0), config, uniform);
  auto closed = run(scenario, PolicySpec::uniform(branches, 1.0), config, uniform);
  Baselines b;
  b.seed = config.master_seed;
  b.replications = config.replications;
  b.measure_days = open.mean.measure_days;
  b.co.resize(branches);
  for (std::size_t i = 0; i < branches; ++i) {
    b.co[i] = open.mean.checkouts(i);
    if (!(b.co[i] > 0.0))
      throw Error(ErrorKind::ZeroBaseline,
                  "branch " + std::to_string(i) + " records no checkouts with beta = 0");
  }
  b.cq = collection_quality(closed.mean, scenario);
  for (std::size_t i = 0; i < branches; ++i)
    if (!(b.cq[i] > 0.0))
      throw Error(ErrorKind::ZeroBaseline,
                  "branch " + std::to_string(i) + " has zero collection quality with beta = 1");
  return b;
}

}  // namespace holds
