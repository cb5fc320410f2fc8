#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "holds/model.hpp"
#include "holds/optimizer.hpp"
#include "holds/oracles.hpp"
#include "holds/scenario.hpp"
#include "holds/simulator.hpp"

namespace holds {

// Structured text (JSON) forms. Field names follow the type definitions;
// readers reject unknown fields and report ParseError.
nlohmann::json to_json(const Scenario& scenario);
nlohmann::json to_json(const PolicySpec& policy);
nlohmann::json to_json(const SmallInstance& instance);
nlohmann::json to_json(const GeneratorConfig& config);
nlohmann::json to_json(const Baselines& baselines);
nlohmann::json to_json(const SearchConfig& config);

Scenario scenario_from_json(const nlohmann::json& j);
PolicySpec policy_from_json(const nlohmann::json& j);
SmallInstance instance_from_json(const nlohmann::json& j);
GeneratorConfig generator_config_from_json(const nlohmann::json& j);
Baselines baselines_from_json(const nlohmann::json& j);
SearchConfig search_config_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);
PolicySpec load_policy(const std::filesystem::path& path);
SmallInstance load_instance(const std::filesystem::path& path);

// Baselines live next to their scenario: "<scenario>.baseline.json".
std::filesystem::path baseline_path(const std::filesystem::path& scenario_path);

// Throws MissingBaseline if the artifact does not exist.
Baselines load_baselines_for(const std::filesystem::path& scenario_path);

// Reads an optional object field set against a whitelist; used by the
// command-line configs as well.
void check_fields(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const char* what);

}  // namespace holds
