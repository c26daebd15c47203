#pragma once

// Deficit-based performance criteria and the sustainability index.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "respg/reservoir_env.hpp"

namespace respg::metrics {

struct SupplyRecord {
  std::vector<double> demand;    // X^T per month, TAF
  std::vector<double> supplied;  // X^S per month, TAF
};

// max(0, demand - supplied). Throws LengthMismatch.
std::vector<double> deficits(const SupplyRecord& rec);

// sum min(supplied, demand) / sum demand. Throws ZeroDemand.
double reliability(const SupplyRecord& rec);

// Recoveries (failure followed by non-failure) over failure months; 1 when
// there are no failures.
double resilience(std::span<const double> deficits);

// Mean deficit over failure months, divided by total demand; 0 when there
// are no failures. Throws ZeroDemand.
double vulnerability(const SupplyRecord& rec);

// Worst water-year ratio of summed deficit to summed demand. The record must
// start in October and cover whole years (PartialYear otherwise); years with
// zero demand score 0.
double max_annual_deficit(const SupplyRecord& rec);

// (Rel * Res * (1 - Vul) * (1 - MaxDeficit))^(1/4). Every factor must lie in
// [0, 1]; throws FactorOutOfRange.
double sustainability_index(double rel, double res, double vul, double max_deficit);

struct MonthRecord {
  int year = 0;   // calendar
  int month = 1;  // calendar 1..12
  double storage = 0.0;  // end of month, TAF
  double release = 0.0;
  double spill = 0.0;
  double deficit = 0.0;
  double power_gwh = 0.0;
  double reward = 0.0;
  double demand = 0.0;  // not part of the CSV; filled from the reservoir schedule
};

using Trajectory = std::vector<MonthRecord>;

struct PerformanceReport {
  double rel = 0.0;
  double res = 0.0;
  double vul = 0.0;
  double max_deficit = 0.0;
  double si = 0.0;
  double avg_annual_power_gwh = 0.0;
  double cum_reward = 0.0;
  bool zero_demand = false;  // Rel forced to 1 because total demand was 0
};

// Supplied water is the release. Throws PartialYear.
PerformanceReport report(const Trajectory& traj);

// Header `year,month,storage,release,spill,deficit,power_gwh,reward`.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// Demand is taken from `demand` by water-year month. Throws MalformedRow.
Trajectory read_trajectory_csv(std::istream& in, const env::MonthArray& demand);

// Header `method,rel,res,vul,max_deficit,si,avg_annual_power_gwh,cum_reward`.
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const std::string& method, const PerformanceReport& r);

// Water year label: the calendar year in which the October..September year ends.
int water_year(int calendar_year, int calendar_month) noexcept;

}  // namespace respg::metrics
