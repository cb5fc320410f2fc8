#include "holds/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "holds/error.hpp"
#include "holds/io.hpp"
#include "holds/optimizer.hpp"
#include "holds/oracles.hpp"
#include "holds/scenario.hpp"

namespace holds {

namespace fs = std::filesystem;

namespace {

// Shortest round-trip text for a double; integral values keep a ".0".
std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  std::string s(buf, end);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::optional<RewardVector> rewards_for(const Scenario& scenario, const Baselines& baselines,
                                        const PolicySpec& policy, bool uniform) {
  if (policy.fulfillment != FulfillmentMethod::NearOptimal) return std::nullopt;
  if (uniform) return RewardVector::uniform(scenario.branch_count());
  return usage_rewards(scenario, baselines.co);
}

SimConfig sim_config(const Baselines& b, std::optional<int> reps, std::optional<std::uint64_t> seed) {
  SimConfig c;
  c.replications = reps.value_or(b.replications);
  c.master_seed = seed.value_or(b.seed);
  c.measure_days = b.measure_days;
  return c;
}

void require_reps(int reps) {
  if (reps < 1) throw Error(ErrorKind::UsageError, "--reps must be >= 1");
}

std::string metrics_csv(const Scenario& s, const SimResult& r, const ObjectivePoint& p) {
  auto cq = collection_quality(r.mean, s);
  std::ostringstream out;
  out << "branch,CO_browse,CO_hold,CQ,usage_ratio,quality_ratio,net_inflow,label\n";
  for (std::size_t i = 0; i < s.branch_count(); ++i)
    out << i << ',' << num(r.mean.co_browse[i]) << ',' << num(r.mean.co_hold[i]) << ',' << num(cq[i])
        << ',' << num(p.usage_ratio[i]) << ',' << num(p.quality_ratio[i]) << ','
        << num(p.net_inflow[i]) << ',' << s.branches[i].label << '\n';
  return out.str();
}

std::string flows_csv(const Scenario& s, const SimResult& r) {
  const std::size_t n = s.branch_count();
  std::ostringstream out;
  out << "source,destination,weighted_count\n";
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && r.mean.flow[a * n + b] != 0.0)
        out << a << ',' << b << ',' << num(r.mean.flow[a * n + b]) << '\n';
  return out.str();
}

nlohmann::json summary_json(const ObjectivePoint& p, const SimResult& r, const SimConfig& c) {
  return {{"f", p.f},
          {"g", p.g},
          {"g_Nash", p.g_nash},
          {"f_standard_error", p.f_standard_error()},
          {"g_standard_error", p.g_standard_error()},
          {"rejected_holds", p.rejected_holds},
          {"hold_requests", r.mean.hold_requests},
          {"replications", c.replications},
          {"seed", c.master_seed},
          {"measure_days", r.mean.measure_days}};
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "policy,f,g,g_nash,rejected_holds\n";
  for (const auto& row : rows)
    out << row.name << ',' << num(row.point.f) << ',' << num(row.point.g) << ','
        << num(row.point.g_nash) << ',' << num(row.point.rejected_holds) << '\n';
  return out.str();
}

}  // namespace

std::vector<ComparisonRow> compare(const Scenario& scenario, const Baselines& baselines,
                                   const std::vector<NamedPolicy>& policies, const SimConfig& config,
                                   bool uniform_rewards) {
  if (policies.size() < 2) throw Error(ErrorKind::UsageError, "compare needs at least two policies");
  std::vector<ComparisonRow> rows;
  for (const auto& [name, policy] : policies) {
    auto p = normalized(policy, scenario.branch_count());
    auto result = run(scenario, p, config, rewards_for(scenario, baselines, p, uniform_rewards));
    rows.push_back({name, evaluate(result, baselines, scenario)});
  }
  return rows;
}

std::vector<NamedPolicy> canonical_policies(const Scenario& scenario, const Baselines& baselines,
                                            const std::vector<double>& balanced_beta,
                                            const SimConfig& config) {
  const std::size_t n = scenario.branch_count();
  PolicySpec balanced;
  balanced.beta = balanced_beta;
  balanced = normalized(balanced, n);
  PolicySpec tiered = tierify(scenario, balanced, usage_rewards(scenario, baselines.co), config);
  PolicySpec tiered_no_reserve = tiered;
  tiered_no_reserve.beta.assign(n, 0.0);
  return {{"random_available_beta0", PolicySpec::uniform(n, 0.0, FulfillmentMethod::RandomAvailable)},
          {"near_optimal_beta0", PolicySpec::uniform(n, 0.0, FulfillmentMethod::NearOptimal)},
          {"tiered_balanced", tiered},
          {"tiered_balanced_beta0", tiered_no_reserve}};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Library holds simulator and reserve-policy optimizer"};
  app.require_subcommand(1);
  app.footer("Worker threads: HOLDS_WORKERS (default: all cores); never changes results.");

  std::string config_path, out_path, scenario_path, policy_path, instance_path, balanced_path;
  std::vector<std::string> policy_paths;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  bool uniform_rewards = false;
  bool with_tiered = false;

  auto* gen = app.add_subcommand("gen-scenario", "Generate a synthetic scenario");
  gen->add_option("--config", config_path, "Generator config (JSON); defaults if omitted");
  gen->add_option("--out", out_path, "Scenario file to write")->required();
  gen->add_option("--seed", seed, "Override the config seed");

  auto* base = app.add_subcommand("baseline", "Freeze objective baselines next to the scenario");
  base->add_option("--scenario", scenario_path, "Scenario file")->required();
  base->add_option("--reps", reps, "Replications (default 10)");
  base->add_option("--seed", seed, "Master seed (default 0)");

  auto* sim = app.add_subcommand("simulate", "Simulate one policy");
  sim->add_option("--scenario", scenario_path, "Scenario file")->required();
  sim->add_option("--policy", policy_path, "PolicySpec file")->required();
  sim->add_option("--reps", reps, "Replications (default: the baseline's)");
  sim->add_option("--seed", seed, "Master seed (default: the baseline's)");
  sim->add_option("--out", out_path, "Output directory")->required();
  sim->add_flag("--uniform-rewards", uniform_rewards, "NearOptimal with r = 1 instead of usage rewards");

  auto* opt = app.add_subcommand("optimize", "Search the reserve fractions for the Pareto frontier");
  opt->add_option("--scenario", scenario_path, "Scenario file")->required();
  opt->add_option("--config", config_path, "Search config (JSON); defaults if omitted");
  opt->add_option("--reps", reps, "Override replications per candidate");
  opt->add_option("--seed", seed, "Override the search seed");
  opt->add_option("--out", out_path, "Output directory")->required();
  opt->add_flag("--tiered", with_tiered, "Also re-evaluate every frontier point under tiered fulfillment");

  auto* tier = app.add_subcommand("tierify", "Convert a NearOptimal policy into its tiered form");
  tier->add_option("--scenario", scenario_path, "Scenario file")->required();
  tier->add_option("--policy", policy_path, "NearOptimal PolicySpec file")->required();
  tier->add_option("--seed", seed, "Master seed (default: the baseline's)");
  tier->add_option("--out", out_path, "PolicySpec file to write")->required();

  auto* orc = app.add_subcommand("oracle", "Exact DP, LP bound, approximation and policy value");
  orc->add_option("--instance", instance_path, "Small instance file")->required();

  auto* cmp = app.add_subcommand("compare", "Evaluate several policies with identical seeds");
  cmp->add_option("--scenario", scenario_path, "Scenario file")->required();
  cmp->add_option("--policy", policy_paths, "PolicySpec files; omit for the canonical four-way run");
  cmp->add_option("--balanced", balanced_path, "Balanced policy for the four-way run (default beta = 0.5)");
  cmp->add_option("--reps", reps, "Replications (default: the baseline's)");
  cmp->add_option("--seed", seed, "Master seed (default: the baseline's)");
  cmp->add_option("--out", out_path, "Optional CSV file for the table");
  cmp->add_flag("--uniform-rewards", uniform_rewards, "NearOptimal with r = 1 instead of usage rewards");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << to_string(ErrorKind::UsageError) << ": " << e.what() << '\n';
    return 2;
  }

  try {
    if (reps) require_reps(*reps);
    if (gen->parsed()) {
      GeneratorConfig c = config_path.empty() ? GeneratorConfig{}
                                              : generator_config_from_json(read_json_file(config_path));
      if (seed) c.seed = *seed;
      auto s = generate(c);
      write_json_file(out_path, to_json(s));
      out << "wrote " << out_path << " (" << s.branch_count() << " branches, " << s.title_count()
          << " titles, " << s.total_copies() << " copies)\n";
    } else if (base->parsed()) {
      auto s = load_scenario(scenario_path);
      SimConfig c;
      c.replications = reps.value_or(10);
      c.master_seed = seed.value_or(0);
      auto b = freeze_baselines(s, c);
      auto path = baseline_path(scenario_path);
      write_json_file(path, to_json(b));
      out << "wrote " << path.string() << '\n';
    } else if (sim->parsed()) {
      auto s = load_scenario(scenario_path);
      auto b = load_baselines_for(scenario_path);
      auto policy = normalized(load_policy(policy_path), s.branch_count());
      auto c = sim_config(b, reps, seed);
      auto result = run(s, policy, c, rewards_for(s, b, policy, uniform_rewards));
      auto point = evaluate(result, b, s);
      fs::path dir = out_path;
      write_text_file(dir / "metrics.csv", metrics_csv(s, result, point));
      write_text_file(dir / "flows.csv", flows_csv(s, result));
      write_json_file(dir / "summary.json", summary_json(point, result, c));
      out << "f=" << num(point.f) << " g=" << num(point.g) << " g_Nash=" << num(point.g_nash)
          << " rejected_holds=" << num(point.rejected_holds) << '\n';
    } else if (opt->parsed()) {
      auto s = load_scenario(scenario_path);
      auto b = load_baselines_for(scenario_path);
      SearchConfig c = config_path.empty() ? SearchConfig{}
                                           : search_config_from_json(read_json_file(config_path));
      if (reps) c.replications = *reps;
      if (seed) c.seed = *seed;
      auto result = optimize(s, b, c);
      fs::path dir = out_path;
      const auto& entries = result.archive.entries();
      std::ostringstream pareto;
      pareto << "point";
      for (std::size_t i = 0; i < s.branch_count(); ++i) pareto << ",beta_" << i;
      pareto << ",f,g,f_standard_error,g_standard_error,iteration,hypervolume_at_insertion\n";
      for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        pareto << k;
        for (double v : e.candidate.beta) pareto << ',' << num(v);
        pareto << ',' << num(e.candidate.f) << ',' << num(e.candidate.g) << ',' << num(e.candidate.f_se)
               << ',' << num(e.candidate.g_se) << ',' << e.candidate.iteration << ','
               << num(e.hypervolume_at_insertion) << '\n';
        PolicySpec p;
        p.beta = e.candidate.beta;
        write_json_file(dir / "policies" / ("point_" + std::to_string(k) + ".json"), to_json(p));
      }
      write_text_file(dir / "pareto.csv", pareto.str());
      std::ostringstream hv;
      hv << "iteration,hypervolume\n";
      for (std::size_t k = 0; k < result.hypervolume_by_iteration.size(); ++k)
        hv << k << ',' << num(result.hypervolume_by_iteration[k]) << '\n';
      write_text_file(dir / "hypervolume.csv", hv.str());
      if (with_tiered) {
        auto rows = reevaluate_tiered(result.archive, s, b, c.replications);
        std::ostringstream t;
        t << "point,f_near_optimal,g_near_optimal,f_tiered,g_tiered\n";
        for (std::size_t k = 0; k < rows.size(); ++k) {
          t << k << ',' << num(rows[k].f_near_optimal) << ',' << num(rows[k].g_near_optimal) << ','
            << num(rows[k].f_tiered) << ',' << num(rows[k].g_tiered) << '\n';
          PolicySpec p;
          p.beta = rows[k].beta;
          p.fulfillment = FulfillmentMethod::Tiered;
          p.tier_assignment = rows[k].tiers;
          write_json_file(dir / "policies" / ("point_" + std::to_string(k) + "_tiered.json"), to_json(p));
        }
        write_text_file(dir / "tiered.csv", t.str());
      }
      out << "frontier points: " << entries.size() << ", hypervolume " << num(result.archive.hypervolume())
          << '\n';
    } else if (tier->parsed()) {
      auto s = load_scenario(scenario_path);
      auto b = load_baselines_for(scenario_path);
      auto policy = normalized(load_policy(policy_path), s.branch_count());
      if (policy.fulfillment != FulfillmentMethod::NearOptimal)
        throw Error(ErrorKind::ConfigError, "tierify expects a NearOptimal policy");
      auto tiered = tierify(s, policy, usage_rewards(s, b.co), sim_config(b, std::nullopt, seed));
      write_json_file(out_path, to_json(tiered));
      out << "wrote " << out_path << '\n';
    } else if (orc->parsed()) {
      auto inst = load_instance(instance_path);
      auto r = evaluate_oracles(inst);
      out << "V_1=" << num(r.dp) << '\n'
          << "LP=" << num(r.lp) << '\n'
          << "H_1=" << num(r.approx) << '\n'
          << "R_1=" << num(r.policy) << '\n'
          << "R_1/V_1=" << (r.dp > 0 ? num(r.policy / r.dp) : std::string("nan")) << '\n'
          << "H_1/LP=" << (r.lp > 0 ? num(r.approx / r.lp) : std::string("nan")) << '\n';
    } else if (cmp->parsed()) {
      auto s = load_scenario(scenario_path);
      auto b = load_baselines_for(scenario_path);
      auto c = sim_config(b, reps, seed);
      std::vector<NamedPolicy> policies;
      if (policy_paths.empty()) {
        std::vector<double> balanced(s.branch_count(), 0.5);
        if (!balanced_path.empty()) balanced = load_policy(balanced_path).beta;
        policies = canonical_policies(s, b, balanced, c);
      } else {
        for (const auto& path : policy_paths)
          policies.push_back({fs::path(path).stem().string(), load_policy(path)});
      }
      auto table = comparison_table(compare(s, b, policies, c, uniform_rewards));
      if (!out_path.empty()) write_text_file(out_path, table);
      out << table;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << to_string(ErrorKind::FileError) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace holds
