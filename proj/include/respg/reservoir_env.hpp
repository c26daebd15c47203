#pragma once

// Monthly single-reservoir simulator.
//
// Units: volumes in TAF, evaporation depths in inches, elevations in feet,
// turbine flows in m^3/s. Month arrays are indexed by water-year month
// (October = 0). A month is 30 days for every rate/volume conversion.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace respg::env {

inline constexpr int kMonths = 12;
inline constexpr double kDaysPerMonth = 30.0;
inline constexpr double kHoursPerMonth = kDaysPerMonth * 24.0;
inline constexpr double kGravity = 9.81;
inline constexpr double kWaterDensity = 1000.0;
inline constexpr double kFeetToMeters = 0.3048;

using MonthArray = std::array<double, kMonths>;

struct BathymetryRow {
  double storage_taf;
  double elevation_ft;
  double area_acres;
};

struct TurbineSpec {
  double efficiency = 0.85;
  double max_flow_cms = 0.0;
  double tailwater_elevation_ft = 0.0;
};

struct ReleaseBounds {
  double min_taf = 0.0;
  double max_taf = 0.0;
};

struct ReservoirSpec {
  double capacity = 0.0;
  double min_storage = 0.0;
  double initial_storage = 0.0;  // evaluation start storage
  std::vector<BathymetryRow> bathymetry;
  MonthArray rule_curve{};  // maximum allowable end-of-month storage
  MonthArray evap_in{};
  MonthArray demand{};
  TurbineSpec turbine;
  ReleaseBounds release;
  double penalty_coefficient = 10.0;  // reward units per TAF above release.max_taf

  // Throws InvalidSpec on any broken invariant.
  void validate() const;
};

// Bundled Folsom-like approximation (same values as data/folsom.cfg).
ReservoirSpec folsom_fixture();

ReservoirSpec load_reservoir_spec(std::istream& in);
ReservoirSpec load_reservoir_file(const std::filesystem::path& path);
void write_reservoir_spec(std::ostream& out, const ReservoirSpec& spec);

struct EnvState {
  int month_index = 0;  // 0 = October
  double storage = 0.0;
  int step_count = 0;
};

struct Observation {
  double d1 = 0.0;
  double d2 = 0.0;
  double c = 0.0;

  std::array<double, 3> as_array() const noexcept { return {d1, d2, c}; }
};

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  double power_gwh = 0.0;
  double deficit = 0.0;
  double spill = 0.0;
  double evaporation = 0.0;
  double release = 0.0;
  double penalty = 0.0;
  bool done = false;
};

struct Stage {
  double elevation_ft;
  double area_acres;
};

Observation encode_observation(const EnvState& state, const ReservoirSpec& spec) noexcept;

// Piecewise-linear in storage; throws OutOfTable outside the table span.
Stage interp_bathymetry(double storage, const ReservoirSpec& spec);

// rate (in) * start-of-month area (acres) / 12 / 1000.
double evaporation_volume(const EnvState& state, const ReservoirSpec& spec);

// Evaporation actually charged in a step: evaporation_volume limited to the
// water above min_storage after the inflow arrives.
double charged_evaporation(const EnvState& state, double inflow, const ReservoirSpec& spec);

// Hourly energy in MWh (= average MW). Throws FlowExceedsTurbine.
double hydropower(double head_m, double turbine_flow_cms, const ReservoirSpec& spec);

// power - deficit^2 + penalty, penalty <= 0.
double reward(double power_gwh, double deficit_taf, double penalty) noexcept;

double taf_per_month_to_cms(double taf) noexcept;
double action_to_release(double action, const ReservoirSpec& spec) noexcept;
double release_to_action(double release_taf, const ReservoirSpec& spec) noexcept;

struct WaterBalance {
  double release;
  double spill;
  double end_storage;
};

// Release is clipped to the water above `floor`; anything left above
// `ceiling` after the release is spilled.
WaterBalance water_balance(double storage, double inflow, double evaporation,
                           double requested_release, double floor, double ceiling) noexcept;

// Normalized action in [0, 1] (clamped) mapped onto the release bounds.
StepOutcome step(const EnvState& state, double action, double inflow, const ReservoirSpec& spec);

// Same transition driven by a release request in TAF.
StepOutcome step_release(const EnvState& state, double requested_release, double inflow,
                         const ReservoirSpec& spec);

// Throws StorageOutOfBounds unless min_storage <= storage <= capacity.
EnvState reset(const ReservoirSpec& spec, double initial_storage, int start_month = 0);

}  // namespace respg::env
