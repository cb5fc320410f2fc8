#include "holds/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "holds/error.hpp"
#include "holds/parallel.hpp"

namespace holds {

bool dominates(double f1, double g1, double f2, double g2) {
  return f1 >= f2 && g1 >= g2 && (f1 > f2 || g1 > g2);
}

double hypervolume(std::span<const std::pair<double, double>> points) {
  std::vector<std::pair<double, double>> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second > b.second);
  });
  double area = 0.0, covered = 0.0;
  for (const auto& [f, g] : pts) {
    if (f <= 0.0) break;
    if (g > covered) {
      area += f * (g - covered);
      covered = g;
    }
  }
  return area;
}

bool ParetoArchive::insert(const Candidate& c, std::uint64_t seed, int replications) {
  for (const auto& e : entries_) {
    const auto& o = e.candidate;
    if (dominates(o.f, o.g, c.f, c.g) || (o.f == c.f && o.g == c.g)) return false;
  }
  std::erase_if(entries_, [&](const Entry& e) {
    return dominates(c.f, c.g, e.candidate.f, e.candidate.g);
  });
  entries_.push_back({c, seed, replications, 0.0});
  entries_.back().hypervolume_at_insertion = hypervolume();
  return true;
}

double ParetoArchive::hypervolume() const {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(entries_.size());
  for (const auto& e : entries_) pts.emplace_back(e.candidate.f, e.candidate.g);
  return holds::hypervolume(pts);
}

std::vector<int> pareto_ranks(std::span<const Candidate> pts) {
  const std::size_t n = pts.size();
  std::vector<int> rank(n, -1);
  std::vector<int> dominated_by(n, 0);
  std::vector<std::vector<std::size_t>> dominates_list(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pts[p].f, pts[p].g, pts[q].f, pts[q].g)) dominates_list[p].push_back(q);
      else if (dominates(pts[q].f, pts[q].g, pts[p].f, pts[p].g)) ++dominated_by[p];
    }
  std::vector<std::size_t> front;
  for (std::size_t p = 0; p < n; ++p)
    if (dominated_by[p] == 0) {
      rank[p] = 0;
      front.push_back(p);
    }
  for (int level = 0; !front.empty(); ++level) {
    std::vector<std::size_t> next;
    for (std::size_t p : front)
      for (std::size_t q : dominates_list[p])
        if (--dominated_by[q] == 0) {
          rank[q] = level + 1;
          next.push_back(q);
        }
    front = std::move(next);
  }
  return rank;
}

std::vector<double> crowding_distances(std::span<const Candidate> pts, std::span<const int> ranks) {
  const std::size_t n = pts.size();
  std::vector<double> dist(n, 0.0);
  const int max_rank = n == 0 ? -1 : *std::max_element(ranks.begin(), ranks.end());
  for (int r = 0; r <= max_rank; ++r) {
    std::vector<std::size_t> front;
    for (std::size_t k = 0; k < n; ++k)
      if (ranks[k] == r) front.push_back(k);
    for (int objective = 0; objective < 2; ++objective) {
      auto value = [&](std::size_t k) { return objective == 0 ? pts[k].f : pts[k].g; };
      std::stable_sort(front.begin(), front.end(),
                       [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
      if (front.empty()) continue;
      dist[front.front()] = dist[front.back()] = std::numeric_limits<double>::infinity();
      const double span = value(front.back()) - value(front.front());
      if (span <= 0.0) continue;
      for (std::size_t k = 1; k + 1 < front.size(); ++k)
        dist[front[k]] += (value(front[k + 1]) - value(front[k - 1])) / span;
    }
  }
  return dist;
}

std::vector<Candidate> select_survivors(std::vector<Candidate> pool, std::size_t cap) {
  if (pool.size() <= cap) return pool;
  auto ranks = pareto_ranks(pool);
  auto crowd = crowding_distances(pool, ranks);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranks[a] != ranks[b]) return ranks[a] < ranks[b];
    return crowd[a] > crowd[b];
  });
  std::vector<Candidate> kept;
  kept.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) kept.push_back(std::move(pool[order[k]]));
  return kept;
}

std::vector<std::vector<double>> EvolutionaryProposer::propose(std::span<const Candidate> population,
                                                               std::size_t count, Rng& rng) {
  if (population.empty()) throw Error(ErrorKind::ConfigError, "cannot propose from an empty population");
  auto ranks = pareto_ranks(population);
  auto crowd = crowding_distances(population, ranks);
  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, config_.mutation_scale);
  auto tournament = [&]() -> const Candidate& {
    std::size_t a = pick(rng), b = pick(rng);
    if (ranks[a] != ranks[b]) return population[ranks[a] < ranks[b] ? a : b];
    return population[crowd[a] >= crowd[b] ? a : b];
  };

  const std::size_t genes = population.front().beta.size();
  const double per_gene = std::max(1.0 / static_cast<double>(std::max<std::size_t>(genes, 1)), 0.1);
  std::vector<std::vector<double>> children;
  children.reserve(count);
  while (children.size() < count) {
    const auto& p1 = tournament();
    const auto& p2 = tournament();
    std::vector<double> child = p1.beta;
    if (unit(rng) < config_.crossover_rate) {
      for (std::size_t k = 0; k < genes; ++k) {
        double lo = std::min(p1.beta[k], p2.beta[k]);
        double hi = std::max(p1.beta[k], p2.beta[k]);
        double spread = config_.blend_alpha * (hi - lo);
        child[k] = lo - spread + unit(rng) * (hi - lo + 2.0 * spread);
      }
    }
    for (auto& v : child) {
      if (unit(rng) < per_gene) v += noise(rng);
      v = std::clamp(v, 0.0, 1.0);
    }
    children.push_back(std::move(child));
  }
  return children;
}

Evaluator near_optimal_evaluator(const Scenario& scenario, const Baselines& baselines,
                                 int replications) {
  auto rewards = usage_rewards(scenario, baselines.co);
  return [&scenario, &baselines, rewards, replications](const std::vector<double>& beta) {
    PolicySpec policy;
    policy.beta = beta;
    SimConfig config;
    config.replications = replications;
    config.master_seed = baselines.seed;
    config.measure_days = baselines.measure_days;
    config.workers = 1;
    return evaluate(run(scenario, policy, config, rewards), baselines, scenario);
  };
}

namespace {

std::vector<Candidate> evaluate_batch(const std::vector<std::vector<double>>& betas,
                                      const Evaluator& evaluate, std::size_t workers, int iteration) {
  std::vector<Candidate> out(betas.size());
  parallel_for(betas.size(), workers, [&](std::size_t k) {
    auto point = evaluate(betas[k]);
    out[k] = {betas[k], point.f, point.g, point.f_standard_error(), point.g_standard_error(), iteration};
  });
  return out;
}

}  // namespace

OptimizeResult optimize(std::size_t branch_count, const Evaluator& evaluate, const SearchConfig& config,
                        Proposer* proposer) {
  if (config.batch_size < 1) throw Error(ErrorKind::ConfigError, "batch_size must be >= 1");
  if (config.iterations < 0) throw Error(ErrorKind::ConfigError, "iterations must be >= 0");
  const std::size_t workers = config.workers ? config.workers : default_workers();
  EvolutionaryProposer fallback(config);
  if (!proposer) proposer = &fallback;
  Rng rng = make_rng(config.seed, 0, 0, Stream::Search);

  OptimizeResult result;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<std::vector<double>> grid;
  for (std::size_t k = 0; k < batch; ++k) {
    double b = batch == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(batch - 1);
    grid.emplace_back(branch_count, b);
  }
  std::vector<Candidate> population = evaluate_batch(grid, evaluate, workers, 0);
  for (const auto& c : population) {
    result.archive.insert(c, config.seed, config.replications);
    result.evaluated.push_back(c);
  }
  result.hypervolume_by_iteration.push_back(result.archive.hypervolume());

  const auto cap = static_cast<std::size_t>(std::max(config.population_cap, config.batch_size));
  for (int it = 1; it <= config.iterations; ++it) {
    auto betas = proposer->propose(population, batch, rng);
    auto offspring = evaluate_batch(betas, evaluate, workers, it);
    for (const auto& c : offspring) {
      result.archive.insert(c, config.seed, config.replications);
      result.evaluated.push_back(c);
      population.push_back(c);
    }
    population = select_survivors(std::move(population), cap);
    result.hypervolume_by_iteration.push_back(result.archive.hypervolume());
  }
  return result;
}

OptimizeResult optimize(const Scenario& scenario, const Baselines& baselines, const SearchConfig& config) {
  auto evaluator = near_optimal_evaluator(scenario, baselines, config.replications);
  return optimize(scenario.branch_count(), evaluator, config);
}

std::vector<TieredComparison> reevaluate_tiered(const ParetoArchive& archive, const Scenario& scenario,
                                                const Baselines& baselines, int replications,
                                                std::size_t workers) {
  if (archive.empty()) throw Error(ErrorKind::ConfigError, "archive is empty");
  const auto rewards = usage_rewards(scenario, baselines.co);
  const auto& entries = archive.entries();
  std::vector<TieredComparison> out(entries.size());
  const std::size_t outer = workers ? workers : default_workers();
  parallel_for(entries.size(), outer, [&](std::size_t k) {
    SimConfig config;
    config.replications = replications;
    config.master_seed = baselines.seed;
    config.measure_days = baselines.measure_days;
    config.workers = 1;
    PolicySpec near;
    near.beta = entries[k].candidate.beta;
    auto tiered = tierify(scenario, near, rewards, config);
    auto tiered_point = evaluate(run(scenario, tiered, config), baselines, scenario);
    auto near_point = evaluate(run(scenario, near, config, rewards), baselines, scenario);
    out[k] = {near.beta, *tiered.tier_assignment, near_point.f, near_point.g, tiered_point.f, tiered_point.g};
  });
  return out;
}

}  // namespace holds
