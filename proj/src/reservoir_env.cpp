#include "respg/reservoir_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>

#include "respg/config.hpp"
#include "respg/error.hpp"
#include "respg/hydrology.hpp"
#include "respg/text.hpp"

namespace respg::env {

namespace {

constexpr double kSecondsPerMonth = kDaysPerMonth * 86400.0;
constexpr double kCubicMetersPerCubicFoot = 0.028316846592;

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidSpec, what); }

double require(const config::Document& doc, const std::string& sec, const std::string& key) {
  const auto v = doc.get_double(sec, key);
  if (!v) invalid("missing [" + sec + "] " + key);
  return *v;
}

std::vector<std::vector<double>> numeric_rows(const config::Document& doc, const std::string& sec,
                                              std::size_t columns) {
  const auto* s = doc.section(sec);
  if (!s) invalid("missing [" + sec + "] table");
  std::vector<std::vector<double>> out;
  for (const auto& row : s->rows) {
    const auto fields = text::split(row, ',');
    if (fields.size() != columns) invalid("[" + sec + "] row '" + row + "' has wrong width");
    std::vector<double> values;
    bool header = false;
    for (const auto f : fields) {
      const auto v = text::parse_double(f);
      if (!v) {
        header = true;
        break;
      }
      values.push_back(*v);
    }
    if (header) {
      if (!out.empty()) invalid("[" + sec + "] non-numeric row '" + row + "'");
      continue;
    }
    out.push_back(std::move(values));
  }
  return out;
}

MonthArray monthly_table(const config::Document& doc, const std::string& sec) {
  const auto rows = numeric_rows(doc, sec, 2);
  if (rows.size() != kMonths) invalid("[" + sec + "] needs 12 monthly rows");
  MonthArray out{};
  std::array<bool, kMonths> seen{};
  for (const auto& r : rows) {
    const int cal = static_cast<int>(r[0]);
    if (cal < 1 || cal > 12 || r[0] != cal) invalid("[" + sec + "] bad month " + text::general(r[0]));
    const int idx = hydrology::water_month_index(cal);
    if (seen[idx]) invalid("[" + sec + "] duplicate month " + std::to_string(cal));
    seen[idx] = true;
    out[idx] = r[1];
  }
  return out;
}

}  // namespace

void ReservoirSpec::validate() const {
  if (!(capacity > 0.0)) invalid("capacity must be positive");
  if (!(min_storage >= 0.0 && min_storage < capacity)) invalid("min_storage must be in [0, capacity)");
  if (initial_storage < min_storage || initial_storage > capacity)
    invalid("initial_storage outside [min_storage, capacity]");
  if (bathymetry.size() < 2) invalid("bathymetry needs at least two rows");
  for (std::size_t i = 1; i < bathymetry.size(); ++i) {
    const auto& a = bathymetry[i - 1];
    const auto& b = bathymetry[i];
    if (!(b.storage_taf > a.storage_taf && b.elevation_ft > a.elevation_ft &&
          b.area_acres > a.area_acres))
      invalid("bathymetry must be strictly increasing in storage, elevation and area");
  }
  if (bathymetry.front().storage_taf > min_storage || bathymetry.back().storage_taf < capacity)
    invalid("bathymetry must span [min_storage, capacity]");
  for (int m = 0; m < kMonths; ++m) {
    if (!(rule_curve[m] > min_storage && rule_curve[m] <= capacity))
      invalid("rule curve month " + std::to_string(m) + " outside (min_storage, capacity]");
    if (evap_in[m] < 0.0) invalid("negative evaporation rate");
    if (demand[m] < 0.0) invalid("negative demand");
  }
  if (!(turbine.efficiency > 0.0 && turbine.efficiency <= 1.0)) invalid("efficiency must be in (0, 1]");
  if (turbine.max_flow_cms < 0.0) invalid("negative turbine capacity");
  if (!(release.min_taf >= 0.0 && release.min_taf <= release.max_taf && release.max_taf > 0.0))
    invalid("release bounds must satisfy 0 <= min <= max, max > 0");
  if (penalty_coefficient < 0.0) invalid("penalty_coefficient must be >= 0");
}

ReservoirSpec folsom_fixture() {
  ReservoirSpec s;
  s.capacity = 966.0;
  s.min_storage = 90.0;
  s.initial_storage = 500.0;
  s.bathymetry = {
      {50.0, 285.0, 1700.0},   {90.0, 305.0, 2300.0},   {150.0, 330.0, 3100.0},
      {250.0, 358.0, 4200.0},  {400.0, 390.0, 5700.0},  {550.0, 415.0, 7200.0},
      {700.0, 435.0, 8700.0},  {850.0, 452.0, 10100.0}, {966.0, 466.0, 11450.0},
  };
  // Oct..Sep. 575 TAF of flood space in Dec-Feb, full pool allowed Jun-Sep.
  s.rule_curve = {800.0, 600.0, 391.0, 391.0, 391.0, 550.0,
                  700.0, 850.0, 966.0, 966.0, 966.0, 966.0};
  s.evap_in = {5.00, 2.05, 0.91, 0.91, 1.61, 3.50, 3.50, 8.07, 10.08, 11.50, 10.20, 7.64};
  s.demand = {130.0, 100.0, 90.0, 90.0, 90.0, 100.0, 130.0, 180.0, 230.0, 260.0, 220.0, 160.0};
  s.turbine = TurbineSpec{0.85, 240.0, 130.0};
  s.release = ReleaseBounds{0.0, hydrology::cfs_to_taf(130000.0, kDaysPerMonth)};
  s.penalty_coefficient = 10.0;
  return s;
}

ReservoirSpec load_reservoir_spec(std::istream& in) {
  const auto doc = config::Document::parse(in);
  ReservoirSpec s;
  s.capacity = require(doc, "reservoir", "capacity_taf");
  s.min_storage = require(doc, "reservoir", "min_storage_taf");
  s.initial_storage = doc.get_double("reservoir", "initial_storage_taf").value_or(s.capacity);
  s.penalty_coefficient = doc.get_double("reservoir", "penalty_coefficient").value_or(10.0);
  s.turbine.efficiency = doc.get_double("turbine", "efficiency").value_or(0.85);
  s.turbine.max_flow_cms = require(doc, "turbine", "max_flow_cms");
  s.turbine.tailwater_elevation_ft = require(doc, "turbine", "tailwater_elevation_ft");
  s.release.min_taf = doc.get_double("release", "min_taf").value_or(0.0);
  if (const auto cfs = doc.get_double("release", "max_cfs")) {
    s.release.max_taf = hydrology::cfs_to_taf(*cfs, kDaysPerMonth);
  } else {
    s.release.max_taf = require(doc, "release", "max_taf");
  }
  for (const auto& r : numeric_rows(doc, "bathymetry", 3)) s.bathymetry.push_back({r[0], r[1], r[2]});
  s.rule_curve = monthly_table(doc, "rule_curve");
  s.evap_in = monthly_table(doc, "evaporation");
  s.demand = monthly_table(doc, "demand");
  s.validate();
  return s;
}

ReservoirSpec load_reservoir_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open reservoir spec " + path.string());
  return load_reservoir_spec(in);
}

void write_reservoir_spec(std::ostream& out, const ReservoirSpec& s) {
  const auto g = [](double v) { return text::general(v); };
  out << "[reservoir]\n"
      << "capacity_taf = " << g(s.capacity) << '\n'
      << "min_storage_taf = " << g(s.min_storage) << '\n'
      << "initial_storage_taf = " << g(s.initial_storage) << '\n'
      << "penalty_coefficient = " << g(s.penalty_coefficient) << "\n\n"
      << "[turbine]\n"
      << "efficiency = " << g(s.turbine.efficiency) << '\n'
      << "max_flow_cms = " << g(s.turbine.max_flow_cms) << '\n'
      << "tailwater_elevation_ft = " << g(s.turbine.tailwater_elevation_ft) << "\n\n"
      << "[release]\n"
      << "min_taf = " << g(s.release.min_taf) << '\n'
      << "max_taf = " << g(s.release.max_taf) << "\n\n"
      << "[bathymetry]\nstorage_taf,elevation_ft,area_acres\n";
  for (const auto& r : s.bathymetry)
    out << g(r.storage_taf) << ',' << g(r.elevation_ft) << ',' << g(r.area_acres) << '\n';
  const auto table = [&](const char* name, const char* col, const MonthArray& a) {
    out << "\n[" << name << "]\nmonth," << col << '\n';
    for (int cal = 1; cal <= 12; ++cal) out << cal << ',' << g(a[hydrology::water_month_index(cal)]) << '\n';
  };
  table("rule_curve", "max_storage_taf", s.rule_curve);
  table("evaporation", "evaporation_in", s.evap_in);
  table("demand", "demand_taf", s.demand);
}

Observation encode_observation(const EnvState& state, const ReservoirSpec& spec) noexcept {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(state.month_index) / kMonths;
  Observation o;
  o.d1 = (std::cos(angle) + 1.0) / 2.0;
  o.d2 = (std::sin(angle) + 1.0) / 2.0;
  o.c = (state.storage - spec.min_storage) / (spec.capacity - spec.min_storage);
  return o;
}

Stage interp_bathymetry(double storage, const ReservoirSpec& spec) {
  const auto& t = spec.bathymetry;
  if (t.empty() || storage < t.front().storage_taf || storage > t.back().storage_taf)
    throw Error(Errc::OutOfTable, "storage " + text::general(storage) + " outside bathymetry");
  const auto it = std::lower_bound(t.begin(), t.end(), storage,
                                   [](const BathymetryRow& r, double s) { return r.storage_taf < s; });
  if (it->storage_taf == storage) return {it->elevation_ft, it->area_acres};
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double f = (storage - lo.storage_taf) / (hi.storage_taf - lo.storage_taf);
  return {lo.elevation_ft + f * (hi.elevation_ft - lo.elevation_ft),
          lo.area_acres + f * (hi.area_acres - lo.area_acres)};
}

double evaporation_volume(const EnvState& state, const ReservoirSpec& spec) {
  const double area = interp_bathymetry(state.storage, spec).area_acres;
  return spec.evap_in[state.month_index] * area / 12.0 / 1000.0;
}

double hydropower(double head_m, double turbine_flow_cms, const ReservoirSpec& spec) {
  if (turbine_flow_cms > spec.turbine.max_flow_cms)
    throw Error(Errc::FlowExceedsTurbine, text::general(turbine_flow_cms) + " cms");
  return spec.turbine.efficiency * kGravity * kWaterDensity * head_m * turbine_flow_cms * 1e-6;
}

double reward(double power_gwh, double deficit_taf, double penalty) noexcept {
  return power_gwh - deficit_taf * deficit_taf + penalty;
}

double taf_per_month_to_cms(double taf) noexcept {
  return taf * 1000.0 * 43560.0 * kCubicMetersPerCubicFoot / kSecondsPerMonth;
}

double action_to_release(double action, const ReservoirSpec& spec) noexcept {
  const double a = std::clamp(action, 0.0, 1.0);
  return spec.release.min_taf + a * (spec.release.max_taf - spec.release.min_taf);
}

double release_to_action(double release_taf, const ReservoirSpec& spec) noexcept {
  const double span = spec.release.max_taf - spec.release.min_taf;
  return std::clamp((release_taf - spec.release.min_taf) / span, 0.0, 1.0);
}

WaterBalance water_balance(double storage, double inflow, double evaporation,
                           double requested_release, double floor, double ceiling) noexcept {
  const double available = storage + inflow - evaporation;
  const double release = std::clamp(requested_release, 0.0, std::max(0.0, available - floor));
  double end = std::max(floor, available - release);  // rounding must not cross the floor
  double spill = 0.0;
  if (end > ceiling) {
    spill = end - ceiling;
    end = ceiling;
  }
  return {release, spill, end};
}

StepOutcome step(const EnvState& state, double action, double inflow, const ReservoirSpec& spec) {
  return step_release(state, action_to_release(action, spec), inflow, spec);
}

double charged_evaporation(const EnvState& state, double inflow, const ReservoirSpec& spec) {
  // The pool cannot evaporate below the floor.
  return std::min(evaporation_volume(state, spec),
                  std::max(0.0, state.storage + inflow - spec.min_storage));
}

StepOutcome step_release(const EnvState& state, double requested_release, double inflow,
                         const ReservoirSpec& spec) {
  const int month = state.month_index;
  const int next_month = (month + 1) % kMonths;

  const double evap = charged_evaporation(state, inflow, spec);
  const double requested = std::clamp(requested_release, spec.release.min_taf, spec.release.max_taf);
  const auto wb = water_balance(state.storage, inflow, evap, requested, spec.min_storage,
                                spec.rule_curve[next_month]);

  StepOutcome out;
  out.evaporation = evap;
  out.release = wb.release;
  out.spill = wb.spill;
  out.next = EnvState{next_month, wb.end_storage, state.step_count + 1};

  const double mean_storage = 0.5 * (state.storage + wb.end_storage);
  const double head_ft =
      interp_bathymetry(mean_storage, spec).elevation_ft - spec.turbine.tailwater_elevation_ft;
  const double head_m = std::max(0.0, head_ft * kFeetToMeters);
  const double turbine_flow = std::min(taf_per_month_to_cms(wb.release), spec.turbine.max_flow_cms);
  out.power_gwh = hydropower(head_m, turbine_flow, spec) * kHoursPerMonth / 1000.0;

  out.deficit = std::max(0.0, spec.demand[month] - wb.release);
  const double overflow = std::max(0.0, wb.release + wb.spill - spec.release.max_taf);
  out.penalty = -spec.penalty_coefficient * overflow;
  out.reward = reward(out.power_gwh, out.deficit, out.penalty);
  out.done = month == kMonths - 1;
  return out;
}

EnvState reset(const ReservoirSpec& spec, double initial_storage, int start_month) {
  if (!(initial_storage >= spec.min_storage && initial_storage <= spec.capacity))
    throw Error(Errc::StorageOutOfBounds,
                "initial storage " + text::general(initial_storage) + " outside [" +
                    text::general(spec.min_storage) + ", " + text::general(spec.capacity) + "]");
  if (start_month < 0 || start_month >= kMonths)
    throw Error(Errc::StorageOutOfBounds, "start month index out of range");
  return EnvState{start_month, initial_storage, 0};
}

}  // namespace respg::env
