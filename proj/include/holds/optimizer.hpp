#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "holds/objectives.hpp"
#include "holds/rng.hpp"
#include "holds/simulator.hpp"

namespace holds {

struct SearchConfig {
  int batch_size = 16;
  int iterations = 100;
  int population_cap = 64;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;      // BLX-alpha spread
  double mutation_scale = 0.15;  // std-dev of the bounded perturbation
  std::uint64_t seed = 1;
  int replications = 10;         // simulator replications per candidate
  std::size_t workers = 0;
};

struct Candidate {
  std::vector<double> beta;
  double f = 0.0;
  double g = 0.0;
  double f_se = 0.0;
  double g_se = 0.0;
  int iteration = 0;  // 0 = initial grid
};

// Non-dominated set under maximisation of (f, g).
class ParetoArchive {
 public:
  struct Entry {
    Candidate candidate;
    std::uint64_t seed = 0;
    int replications = 0;
    double hypervolume_at_insertion = 0.0;
  };

  // Inserts unless an existing entry weakly dominates (or equals) the
  // candidate; evicts entries the candidate dominates. Returns true if kept.
  bool insert(const Candidate& candidate, std::uint64_t seed, int replications);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  double hypervolume() const;

 private:
  std::vector<Entry> entries_;
};

// True if (f1,g1) >= (f2,g2) componentwise with one strict inequality.
bool dominates(double f1, double g1, double f2, double g2);

// Area dominated by the points relative to the reference (0, 0).
double hypervolume(std::span<const std::pair<double, double>> points);

// Non-dominated sorting rank (0 = first front) for each point.
std::vector<int> pareto_ranks(std::span<const Candidate> points);
// Crowding distance of each point within its own front.
std::vector<double> crowding_distances(std::span<const Candidate> points, std::span<const int> ranks);

// Source of new beta vectors; the default is an evolutionary proposer, a
// model-based one can be dropped in.
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual std::vector<std::vector<double>> propose(std::span<const Candidate> population,
                                                   std::size_t count, Rng& rng) = 0;
};

class EvolutionaryProposer : public Proposer {
 public:
  explicit EvolutionaryProposer(const SearchConfig& config) : config_(config) {}
  std::vector<std::vector<double>> propose(std::span<const Candidate> population, std::size_t count,
                                           Rng& rng) override;

 private:
  SearchConfig config_;
};

// Keeps at most `cap` candidates by (rank, crowding distance).
std::vector<Candidate> select_survivors(std::vector<Candidate> pool, std::size_t cap);

// Maps a beta vector to its objective point. Must be deterministic and safe
// to call concurrently.
using Evaluator = std::function<ObjectivePoint(const std::vector<double>& beta)>;

// NearOptimal evaluation with usage-aligned rewards and the baselines' seed.
Evaluator near_optimal_evaluator(const Scenario& scenario, const Baselines& baselines,
                                 int replications);

struct OptimizeResult {
  ParetoArchive archive;
  std::vector<Candidate> evaluated;           // every evaluation, in order
  std::vector<double> hypervolume_by_iteration;  // after init, then each iteration
};

OptimizeResult optimize(std::size_t branch_count, const Evaluator& evaluate, const SearchConfig& config,
                        Proposer* proposer = nullptr);

OptimizeResult optimize(const Scenario& scenario, const Baselines& baselines, const SearchConfig& config);

struct TieredComparison {
  std::vector<double> beta;
  std::vector<int> tiers;
  double f_near_optimal = 0.0;
  double g_near_optimal = 0.0;
  double f_tiered = 0.0;
  double g_tiered = 0.0;
};

// Derives tiers for every archived beta and re-simulates under Tiered.
std::vector<TieredComparison> reevaluate_tiered(const ParetoArchive& archive, const Scenario& scenario,
                                                const Baselines& baselines, int replications,
                                                std::size_t workers = 0);

}  // namespace holds
