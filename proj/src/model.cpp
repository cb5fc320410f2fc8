#include "holds/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holds/error.hpp"

namespace holds {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CalibrationOverflow: return "CalibrationOverflow";
    case ErrorKind::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorKind::ZeroBaseline: return "ZeroBaseline";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::EmptyScenario: return "EmptyScenario";
    case ErrorKind::MissingBaseline: return "MissingBaseline";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::FileError: return "FileError";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::vector<CopyClass> compatibility(PatronClass j, std::size_t branch_count) {
  std::vector<CopyClass> out;
  if (j.mode == Mode::Browse) {
    out.push_back({j.branch, Pool::Reserve});
    out.push_back({j.branch, Pool::Open});
  } else {
    out.reserve(branch_count);
    for (std::size_t i = 0; i < branch_count; ++i) out.push_back({BranchId{i}, Pool::Open});
  }
  return out;
}

std::int64_t Scenario::total_copies() const {
  std::int64_t total = 0;
  for (const auto& row : inventory)
    for (auto c : row) total += c;
  return total;
}

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidScenario, what);
}

}  // namespace

void validate(const Scenario& s) {
  if (s.branches.empty()) invalid("scenario has no branches");
  if (s.titles.empty()) throw Error(ErrorKind::EmptyScenario, "scenario has no titles");
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    const auto& b = s.branches[i];
    if (!(b.demand_size > 0.0 && b.demand_size <= 1.0))
      invalid("branch " + std::to_string(i) + ": demand_size outside (0,1]");
    if (!(b.hold_fraction >= 0.0 && b.hold_fraction <= 1.0))
      invalid("branch " + std::to_string(i) + ": hold_fraction outside [0,1]");
  }
  for (std::size_t l = 0; l < s.titles.size(); ++l) {
    double d = s.titles[l].desirability;
    if (!(d > 0.0 && d <= 1.0)) invalid("title " + std::to_string(l) + ": desirability outside (0,1]");
  }
  if (s.inventory.size() != s.branches.size()) invalid("inventory row count != branch count");
  for (const auto& row : s.inventory) {
    if (row.size() != s.titles.size()) invalid("inventory column count != title count");
    if (std::any_of(row.begin(), row.end(), [](auto c) { return c < 0; }))
      invalid("negative copy count");
  }
  for (std::size_t l = 0; l < s.titles.size(); ++l) {
    std::int64_t total = 0;
    for (const auto& row : s.inventory) total += row[l];
    if (total == 0) invalid("title " + std::to_string(l) + " has no copies anywhere");
  }
  if (s.loan_days <= 0) invalid("loan_days must be positive");
  if (s.warmup_days < 0) invalid("warmup_days must be non-negative");
  if (s.sim_days <= 0) invalid("sim_days must be positive");
  if (!(s.calibration_scale > 0.0 && std::isfinite(s.calibration_scale)))
    invalid("calibration_scale must be positive");
  (void)arrival_rates(s);
}

std::string to_string(FulfillmentMethod method) {
  switch (method) {
    case FulfillmentMethod::NearOptimal: return "NearOptimal";
    case FulfillmentMethod::Tiered: return "Tiered";
    case FulfillmentMethod::RandomAvailable: return "RandomAvailable";
  }
  return "NearOptimal";
}

FulfillmentMethod fulfillment_from_string(const std::string& text) {
  if (text == "NearOptimal") return FulfillmentMethod::NearOptimal;
  if (text == "Tiered") return FulfillmentMethod::Tiered;
  if (text == "RandomAvailable") return FulfillmentMethod::RandomAvailable;
  throw Error(ErrorKind::ParseError, "unknown fulfillment method '" + text + "'");
}

PolicySpec PolicySpec::uniform(std::size_t branch_count, double beta, FulfillmentMethod method) {
  PolicySpec p;
  p.beta.assign(branch_count, beta);
  p.fulfillment = method;
  return p;
}

PolicySpec normalized(PolicySpec policy, std::size_t branch_count) {
  if (policy.beta.size() != branch_count)
    throw Error(ErrorKind::ConfigError, "policy beta has " + std::to_string(policy.beta.size()) +
                                            " entries, scenario has " +
                                            std::to_string(branch_count) + " branches");
  for (auto& b : policy.beta) {
    if (std::isnan(b)) throw Error(ErrorKind::ConfigError, "beta contains NaN");
    b = std::clamp(b, 0.0, 1.0);
  }
  bool tiered = policy.fulfillment == FulfillmentMethod::Tiered;
  if (tiered != policy.tier_assignment.has_value())
    throw Error(ErrorKind::ConfigError,
                tiered ? "Tiered policy requires tier_assignment"
                       : "tier_assignment is only valid for Tiered policies");
  if (tiered) {
    const auto& tiers = *policy.tier_assignment;
    if (tiers.size() != branch_count)
      throw Error(ErrorKind::ConfigError, "tier_assignment length != branch count");
    for (int t : tiers)
      if (t < 1 || t > 3) throw Error(ErrorKind::ConfigError, "tier values must be 1, 2 or 3");
  }
  return policy;
}

ArrivalRates arrival_rates(const Scenario& s) {
  ArrivalRates rates(s.title_count(), s.branch_count());
  for (std::size_t l = 0; l < s.title_count(); ++l) {
    double d = s.titles[l].desirability;
    for (std::size_t i = 0; i < s.branch_count(); ++i) {
      const auto& b = s.branches[i];
      double base = s.calibration_scale * d * b.demand_size;
      double hold = base * b.hold_fraction;
      double browse = base * (1.0 - b.hold_fraction);
      if (hold > 1.0 || browse > 1.0)
        throw Error(ErrorKind::CalibrationOverflow,
                    "arrival probability above 1 at branch " + std::to_string(i) + ", title " +
                        std::to_string(l));
      rates.at(TitleId{l}, {BranchId{i}, Mode::Hold}) = hold;
      rates.at(TitleId{l}, {BranchId{i}, Mode::Browse}) = browse;
    }
  }
  return rates;
}

}  // namespace holds
