#include "holds/io.hpp"

#include <fstream>
#include <sstream>

#include "holds/error.hpp"

namespace holds {

using nlohmann::json;

void check_fields(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, std::string(what) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known)
      throw Error(ErrorKind::ParseError, std::string("unknown field '") + key + "' in " + what);
  }
}

namespace {

template <class T>
T required(const json& j, const char* key, const char* what) {
  if (!j.contains(key))
    throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "' in " + what);
  return j.at(key).get<T>();
}

template <class T>
T optional_field(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

// Converts nlohmann type errors into ParseError.
template <class Fn>
auto parsing(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const Scenario& s) {
  json branches = json::array();
  for (const auto& b : s.branches)
    branches.push_back({{"demand_size", b.demand_size}, {"hold_fraction", b.hold_fraction}, {"label", b.label}});
  json titles = json::array();
  for (const auto& t : s.titles) titles.push_back({{"desirability", t.desirability}});
  return {{"branches", branches},
          {"titles", titles},
          {"inventory", s.inventory},
          {"loan_days", s.loan_days},
          {"warmup_days", s.warmup_days},
          {"sim_days", s.sim_days},
          {"calibration_scale", s.calibration_scale}};
}

Scenario scenario_from_json(const json& j) {
  constexpr const char* what = "scenario";
  return parsing(what, [&] {
    check_fields(j, {"branches", "titles", "inventory", "loan_days", "warmup_days", "sim_days",
                     "calibration_scale"},
                 what);
    Scenario s;
    for (const auto& b : required<json>(j, "branches", what)) {
      check_fields(b, {"demand_size", "hold_fraction", "label"}, "branch");
      s.branches.push_back({required<double>(b, "demand_size", "branch"),
                            required<double>(b, "hold_fraction", "branch"),
                            optional_field<std::string>(b, "label", "")});
    }
    for (const auto& t : required<json>(j, "titles", what)) {
      check_fields(t, {"desirability"}, "title");
      s.titles.push_back({required<double>(t, "desirability", "title")});
    }
    s.inventory = required<std::vector<std::vector<std::int32_t>>>(j, "inventory", what);
    s.loan_days = optional_field<std::int32_t>(j, "loan_days", 21);
    s.warmup_days = optional_field<std::int32_t>(j, "warmup_days", 100);
    s.sim_days = required<std::int32_t>(j, "sim_days", what);
    s.calibration_scale = optional_field<double>(j, "calibration_scale", 1.0);
    validate(s);
    return s;
  });
}

json to_json(const PolicySpec& p) {
  json j = {{"beta", p.beta}, {"fulfillment", to_string(p.fulfillment)}, {"local_first", p.local_first}};
  if (p.tier_assignment) j["tier_assignment"] = *p.tier_assignment;
  return j;
}

PolicySpec policy_from_json(const json& j) {
  constexpr const char* what = "policy";
  return parsing(what, [&] {
    check_fields(j, {"beta", "fulfillment", "tier_assignment", "local_first"}, what);
    PolicySpec p;
    p.beta = required<std::vector<double>>(j, "beta", what);
    p.fulfillment = fulfillment_from_string(required<std::string>(j, "fulfillment", what));
    if (j.contains("tier_assignment")) p.tier_assignment = j.at("tier_assignment").get<std::vector<int>>();
    p.local_first = optional_field<bool>(j, "local_first", false);
    return normalized(std::move(p), p.beta.size());
  });
}

json to_json(const SmallInstance& inst) {
  json copies = json::array();
  for (auto c : inst.network.capacity) copies.push_back({{"capacity", c}});
  json patrons = json::array();
  for (std::size_t k = 0; k < inst.network.patron_classes(); ++k)
    patrons.push_back({{"rate", inst.network.rate[k]},
                       {"reward", inst.network.reward[k]},
                       {"compatible", inst.network.compatible[k]}});
  return {{"copy_classes", copies}, {"patron_classes", patrons}, {"horizon", inst.horizon}};
}

SmallInstance instance_from_json(const json& j) {
  constexpr const char* what = "instance";
  return parsing(what, [&] {
    check_fields(j, {"copy_classes", "patron_classes", "horizon"}, what);
    SmallInstance inst;
    inst.horizon = required<int>(j, "horizon", what);
    for (const auto& c : required<json>(j, "copy_classes", what)) {
      check_fields(c, {"capacity"}, "copy class");
      inst.network.capacity.push_back(required<std::int32_t>(c, "capacity", "copy class"));
    }
    for (const auto& p : required<json>(j, "patron_classes", what)) {
      check_fields(p, {"rate", "reward", "compatible"}, "patron class");
      inst.network.rate.push_back(required<double>(p, "rate", "patron class"));
      inst.network.reward.push_back(optional_field<double>(p, "reward", 1.0));
      inst.network.compatible.push_back(
          required<std::vector<std::size_t>>(p, "compatible", "patron class"));
    }
    validate(inst);
    return inst;
  });
}

json to_json(const GeneratorConfig& c) {
  return {{"branch_count", c.branch_count},
          {"title_count", c.title_count},
          {"seed", c.seed},
          {"demand_low", c.demand_low},
          {"demand_high", c.demand_high},
          {"hold_low", c.hold_low},
          {"hold_high", c.hold_high},
          {"hold_corr", c.hold_corr},
          {"desirability_alpha", c.desirability_alpha},
          {"desirability_beta", c.desirability_beta},
          {"copies_mean", c.copies_mean},
          {"availability_min_branches", c.availability_min_branches},
          {"calibration_scale", c.calibration_scale},
          {"loan_days", c.loan_days},
          {"warmup_days", c.warmup_days},
          {"sim_days", c.sim_days}};
}

GeneratorConfig generator_config_from_json(const json& j) {
  constexpr const char* what = "generator config";
  return parsing(what, [&] {
    check_fields(j, {"branch_count", "title_count", "seed", "demand_low", "demand_high", "hold_low",
                     "hold_high", "hold_corr", "desirability_alpha", "desirability_beta",
                     "copies_mean", "availability_min_branches", "calibration_scale", "loan_days",
                     "warmup_days", "sim_days"},
                 what);
    GeneratorConfig c;
    c.branch_count = optional_field(j, "branch_count", c.branch_count);
    c.title_count = optional_field(j, "title_count", c.title_count);
    c.seed = optional_field(j, "seed", c.seed);
    c.demand_low = optional_field(j, "demand_low", c.demand_low);
    c.demand_high = optional_field(j, "demand_high", c.demand_high);
    c.hold_low = optional_field(j, "hold_low", c.hold_low);
    c.hold_high = optional_field(j, "hold_high", c.hold_high);
    c.hold_corr = optional_field(j, "hold_corr", c.hold_corr);
    c.desirability_alpha = optional_field(j, "desirability_alpha", c.desirability_alpha);
    c.desirability_beta = optional_field(j, "desirability_beta", c.desirability_beta);
    c.copies_mean = optional_field(j, "copies_mean", c.copies_mean);
    c.availability_min_branches =
        optional_field(j, "availability_min_branches", c.availability_min_branches);
    c.calibration_scale = optional_field(j, "calibration_scale", c.calibration_scale);
    c.loan_days = optional_field(j, "loan_days", c.loan_days);
    c.warmup_days = optional_field(j, "warmup_days", c.warmup_days);
    c.sim_days = optional_field(j, "sim_days", c.sim_days);
    validate(c);
    return c;
  });
}

json to_json(const Baselines& b) {
  return {{"baseline_co", b.co},
          {"baseline_cq", b.cq},
          {"seed", b.seed},
          {"replications", b.replications},
          {"measure_days", b.measure_days}};
}

Baselines baselines_from_json(const json& j) {
  constexpr const char* what = "baselines";
  return parsing(what, [&] {
    check_fields(j, {"baseline_co", "baseline_cq", "seed", "replications", "measure_days"}, what);
    Baselines b;
    b.co = required<std::vector<double>>(j, "baseline_co", what);
    b.cq = required<std::vector<double>>(j, "baseline_cq", what);
    b.seed = required<std::uint64_t>(j, "seed", what);
    b.replications = required<int>(j, "replications", what);
    b.measure_days = required<int>(j, "measure_days", what);
    return b;
  });
}

json to_json(const SearchConfig& c) {
  return {{"batch_size", c.batch_size},
          {"iterations", c.iterations},
          {"population_cap", c.population_cap},
          {"crossover_rate", c.crossover_rate},
          {"blend_alpha", c.blend_alpha},
          {"mutation_scale", c.mutation_scale},
          {"seed", c.seed},
          {"replications", c.replications}};
}

SearchConfig search_config_from_json(const json& j) {
  constexpr const char* what = "search config";
  return parsing(what, [&] {
    check_fields(j, {"batch_size", "iterations", "population_cap", "crossover_rate", "blend_alpha",
                     "mutation_scale", "seed", "replications"},
                 what);
    SearchConfig c;
    c.batch_size = optional_field(j, "batch_size", c.batch_size);
    c.iterations = optional_field(j, "iterations", c.iterations);
    c.population_cap = optional_field(j, "population_cap", c.population_cap);
    c.crossover_rate = optional_field(j, "crossover_rate", c.crossover_rate);
    c.blend_alpha = optional_field(j, "blend_alpha", c.blend_alpha);
    c.mutation_scale = optional_field(j, "mutation_scale", c.mutation_scale);
    c.seed = optional_field(j, "seed", c.seed);
    c.replications = optional_field(j, "replications", c.replications);
    if (c.batch_size < 1 || c.iterations < 0 || c.population_cap < 1 || c.replications < 1)
      throw Error(ErrorKind::ConfigError, "search config counts out of range");
    return c;
  });
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::FileError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::FileError, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path));
}

PolicySpec load_policy(const std::filesystem::path& path) {
  return policy_from_json(read_json_file(path));
}

SmallInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

std::filesystem::path baseline_path(const std::filesystem::path& scenario_path) {
  auto p = scenario_path;
  p += ".baseline.json";
  return p;
}

Baselines load_baselines_for(const std::filesystem::path& scenario_path) {
  auto path = baseline_path(scenario_path);
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::MissingBaseline,
                "no baseline at " + path.string() + "; run the baseline command first");
  return baselines_from_json(read_json_file(path));
}

}  // namespace holds
