#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "adviser/core/geo.hpp"
#include "adviser/core/money.hpp"

namespace adviser {

enum class Intervention : int { None = 0, PhoneCall = 1, TravelVoucher = 2, BusPickup = 3, VaccineDrive = 4 };

inline constexpr std::array<Intervention, 5> kAllInterventions = {
    Intervention::None, Intervention::PhoneCall, Intervention::TravelVoucher, Intervention::BusPickup,
    Intervention::VaccineDrive};

constexpr std::string_view intervention_name(Intervention k) {
  switch (k) {
    case Intervention::None: return "none";
    case Intervention::PhoneCall: return "call";
    case Intervention::TravelVoucher: return "voucher";
    case Intervention::BusPickup: return "bus";
    case Intervention::VaccineDrive: return "drive";
  }
  return "none";
}

inline std::optional<Intervention> parse_intervention(std::string_view s) {
  for (auto k : kAllInterventions)
    if (intervention_name(k) == s) return k;
  return std::nullopt;
}

// Per-unit costs. Drives and routes are charged once per drive / operated
// route, not per mother served.
struct CostSchedule {
  Money call = Money::tenths(1);
  Money voucher = Money::tenths(11);
  Money drive = Money::tenths(150);
  Money route = Money::tenths(200);

  Money of(Intervention k) const {
    switch (k) {
      case Intervention::None: return Money{};
      case Intervention::PhoneCall: return call;
      case Intervention::TravelVoucher: return voucher;
      case Intervention::BusPickup: return route;
      case Intervention::VaccineDrive: return drive;
    }
    return Money{};
  }
  bool ordered() const {
    return route > drive && drive > voucher && voucher > call && call > Money{};
  }
  friend bool operator==(const CostSchedule&, const CostSchedule&) = default;
};

// Minutes of the day, inclusive on both ends.
struct TimeWindow {
  int earliest = 0;
  int latest = 0;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Contiguous 1-based days on which a mother may be targeted.
struct EligibilityWindow {
  int first_day = 1;
  int last_day = 1;
  bool contains(int day) const { return first_day <= day && day <= last_day; }
  int length() const { return last_day - first_day + 1; }
  friend bool operator==(const EligibilityWindow&, const EligibilityWindow&) = default;
};

inline constexpr int kIncomeLevels = 5;  // income_level in [0, 4], 0 = poorest

struct FeatureVector {
  int income_level = 0;
  int child_age_months = 0;
  bool prior_reminder = false;
  bool prior_vaccination = false;
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Mother {
  int id = 0;
  GeoPoint location;
  int cell = -1;
  EligibilityWindow eligibility;
  TimeWindow pickup_window;
  FeatureVector features;
};

struct VaccinationCenter {
  int id = 0;
  GeoPoint location;
  TimeWindow dropoff_window;
  int depot_id = 0;
};

struct Depot {
  int id = 0;
  GeoPoint location;
};

struct Bus {
  int id = 0;
  int depot_id = 0;
};

struct Fleet {
  std::vector<Bus> buses;
  int capacity = 30;
};

// Success probability of each intervention for one mother.
struct Probabilities {
  double none = 0.0;
  double call = 0.0;
  double voucher = 0.0;
  double bus = 0.0;
  double drive = 1.0;

  double of(Intervention k) const {
    switch (k) {
      case Intervention::None: return none;
      case Intervention::PhoneCall: return call;
      case Intervention::TravelVoucher: return voucher;
      case Intervention::BusPickup: return bus;
      case Intervention::VaccineDrive: return drive;
    }
    return none;
  }
  double gain(Intervention k) const { return of(k) - none; }
  bool ordered() const {
    return 0.0 <= none && none <= call && call <= voucher && voucher <= bus && bus <= drive && drive <= 1.0;
  }
  friend bool operator==(const Probabilities&, const Probabilities&) = default;
};

// Row i belongs to the i-th mother of the owning instance.
using ProbabilityTable = std::vector<Probabilities>;

}  // namespace adviser
