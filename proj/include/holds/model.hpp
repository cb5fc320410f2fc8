#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holds {

// Dense 0-based branch index.
struct BranchId {
  std::size_t index = 0;
  friend bool operator==(BranchId, BranchId) = default;
  friend auto operator<=>(BranchId, BranchId) = default;
};

// Dense 0-based title index.
struct TitleId {
  std::size_t index = 0;
  friend bool operator==(TitleId, TitleId) = default;
  friend auto operator<=>(TitleId, TitleId) = default;
};

enum class Pool : std::uint8_t { Reserve = 0, Open = 1 };
enum class Mode : std::uint8_t { Browse = 0, Hold = 1 };

// A (branch, pool) pair. Flat index is 2*branch + pool, so classes of one
// branch are adjacent and Open classes are ordered by branch.
struct CopyClass {
  BranchId branch;
  Pool pool = Pool::Open;

  std::size_t flat() const { return 2 * branch.index + static_cast<std::size_t>(pool); }
  static CopyClass from_flat(std::size_t a) {
    return {BranchId{a / 2}, static_cast<Pool>(a % 2)};
  }
  friend bool operator==(const CopyClass&, const CopyClass&) = default;
  friend auto operator<=>(const CopyClass&, const CopyClass&) = default;
};

// A (branch, mode) pair, flat index 2*branch + mode.
struct PatronClass {
  BranchId branch;
  Mode mode = Mode::Browse;

  std::size_t flat() const { return 2 * branch.index + static_cast<std::size_t>(mode); }
  static PatronClass from_flat(std::size_t j) {
    return {BranchId{j / 2}, static_cast<Mode>(j % 2)};
  }
  friend bool operator==(const PatronClass&, const PatronClass&) = default;
};

// Copy classes that may serve patron class `j`: browsers use both pools of
// their own branch, holds use the Open pool of every branch.
std::vector<CopyClass> compatibility(PatronClass j, std::size_t branch_count);

struct Branch {
  double demand_size = 1.0;    // p_i in (0, 1]
  double hold_fraction = 0.0;  // h_i in [0, 1]
  std::string label;
};

struct Title {
  double desirability = 1.0;  // d_l in (0, 1]
};

struct Scenario {
  std::vector<Branch> branches;
  std::vector<Title> titles;
  // inventory[branch][title]
  std::vector<std::vector<std::int32_t>> inventory;
  std::int32_t loan_days = 21;
  std::int32_t warmup_days = 100;
  std::int32_t sim_days = 365;
  double calibration_scale = 1.0;

  std::size_t branch_count() const { return branches.size(); }
  std::size_t title_count() const { return titles.size(); }
  std::int64_t copies(BranchId i, TitleId l) const { return inventory[i.index][l.index]; }
  std::int64_t total_copies() const;
};

// Throws InvalidScenario (or CalibrationOverflow) when an invariant fails.
void validate(const Scenario& scenario);

enum class FulfillmentMethod { NearOptimal, Tiered, RandomAvailable };

std::string to_string(FulfillmentMethod method);
FulfillmentMethod fulfillment_from_string(const std::string& text);

struct PolicySpec {
  std::vector<double> beta;
  FulfillmentMethod fulfillment = FulfillmentMethod::NearOptimal;
  std::optional<std::vector<int>> tier_assignment;
  bool local_first = false;

  static PolicySpec uniform(std::size_t branch_count, double beta,
                            FulfillmentMethod method = FulfillmentMethod::NearOptimal);
};

// Clamps beta into [0,1]; throws ConfigError if the policy does not fit the
// scenario or the tier assignment presence disagrees with the method.
PolicySpec normalized(PolicySpec policy, std::size_t branch_count);

// Per-title, per-patron-class daily arrival probabilities, indexed
// [title][patron flat index].
class ArrivalRates {
 public:
  ArrivalRates() = default;
  ArrivalRates(std::size_t titles, std::size_t branches)
      : branches_(branches), rates_(titles * 2 * branches, 0.0) {}

  double at(TitleId l, PatronClass j) const { return rates_[l.index * 2 * branches_ + j.flat()]; }
  double& at(TitleId l, PatronClass j) { return rates_[l.index * 2 * branches_ + j.flat()]; }

  // Rates of one title over all patron classes (flat order).
  std::vector<double> title_rates(TitleId l) const {
    auto first = rates_.begin() + static_cast<std::ptrdiff_t>(l.index * 2 * branches_);
    return {first, first + static_cast<std::ptrdiff_t>(2 * branches_)};
  }
  std::size_t branch_count() const { return branches_; }
  std::size_t title_count() const { return branches_ == 0 ? 0 : rates_.size() / (2 * branches_); }

 private:
  std::size_t branches_ = 0;
  std::vector<double> rates_;
};

// lambda_hold = s*d*p*h, lambda_browse = s*d*p*(1-h). Throws
// CalibrationOverflow if any rate exceeds 1.
ArrivalRates arrival_rates(const Scenario& scenario);

}  // namespace holds
