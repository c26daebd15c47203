#include "respg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "respg/error.hpp"
#include "respg/hydrology.hpp"
#include "respg/text.hpp"

namespace respg::metrics {

namespace {

void check_lengths(const SupplyRecord& rec) {
  if (rec.demand.size() != rec.supplied.size())
    throw Error(Errc::LengthMismatch, "demand and supplied series differ in length");
}

double total_demand(const SupplyRecord& rec) {
  double total = 0.0;
  for (double d : rec.demand) total += d;
  if (!(total > 0.0)) throw Error(Errc::ZeroDemand, "total demand is zero");
  return total;
}

}  // namespace

std::vector<double> deficits(const SupplyRecord& rec) {
  check_lengths(rec);
  std::vector<double> d(rec.demand.size());
  for (std::size_t t = 0; t < d.size(); ++t) d[t] = std::max(0.0, rec.demand[t] - rec.supplied[t]);
  return d;
}

double reliability(const SupplyRecord& rec) {
  check_lengths(rec);
  const double total = total_demand(rec);
  double credited = 0.0;
  for (std::size_t t = 0; t < rec.demand.size(); ++t)
    credited += std::min(rec.supplied[t], rec.demand[t]);
  return credited / total;
}

double resilience(std::span<const double> d) {
  std::size_t failures = 0;
  std::size_t recoveries = 0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    if (!(d[t] > 0.0)) continue;
    ++failures;
    if (t + 1 < d.size() && !(d[t + 1] > 0.0)) ++recoveries;
  }
  return failures == 0 ? 1.0 : static_cast<double>(recoveries) / static_cast<double>(failures);
}

double vulnerability(const SupplyRecord& rec) {
  const auto d = deficits(rec);
  const double total = total_demand(rec);
  double sum = 0.0;
  std::size_t failures = 0;
  for (double x : d) {
    if (x > 0.0) {
      sum += x;
      ++failures;
    }
  }
  return failures == 0 ? 0.0 : sum / static_cast<double>(failures) / total;
}

double max_annual_deficit(const SupplyRecord& rec) {
  const auto d = deficits(rec);
  if (d.size() % hydrology::kMonthsPerYear != 0)
    throw Error(Errc::PartialYear, "record of " + std::to_string(d.size()) +
                                       " months does not cover whole water years");
  double worst = 0.0;
  for (std::size_t y = 0; y < d.size(); y += hydrology::kMonthsPerYear) {
    double def = 0.0;
    double dem = 0.0;
    for (std::size_t m = y; m < y + hydrology::kMonthsPerYear; ++m) {
      def += d[m];
      dem += rec.demand[m];
    }
    if (dem > 0.0) worst = std::max(worst, def / dem);
  }
  return worst;
}

double sustainability_index(double rel, double res, double vul, double max_deficit) {
  const auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(Errc::FactorOutOfRange, std::string(name) + " = " + text::general(v) +
                                              " outside [0, 1]");
  };
  check(rel, "Rel");
  check(res, "Res");
  check(vul, "Vul");
  check(max_deficit, "MaxDeficit");
  return std::pow(rel * res * (1.0 - vul) * (1.0 - max_deficit), 0.25);
}

int water_year(int calendar_year, int calendar_month) noexcept {
  return calendar_month >= 10 ? calendar_year + 1 : calendar_year;
}

PerformanceReport report(const Trajectory& traj) {
  if (traj.empty() || traj.size() % hydrology::kMonthsPerYear != 0 || traj.front().month != 10)
    throw Error(Errc::PartialYear, "trajectory must start in October and cover whole water years");
  SupplyRecord rec;
  rec.demand.reserve(traj.size());
  rec.supplied.reserve(traj.size());
  PerformanceReport r;
  for (const auto& m : traj) {
    rec.demand.push_back(m.demand);
    rec.supplied.push_back(m.release);
    r.avg_annual_power_gwh += m.power_gwh;
    r.cum_reward += m.reward;
  }
  r.avg_annual_power_gwh /= static_cast<double>(traj.size() / hydrology::kMonthsPerYear);

  double total = 0.0;
  for (double d : rec.demand) total += d;
  r.zero_demand = !(total > 0.0);
  if (r.zero_demand) {
    r.rel = 1.0;
    r.vul = 0.0;
  } else {
    r.rel = reliability(rec);
    r.vul = vulnerability(rec);
  }
  r.res = resilience(deficits(rec));
  r.max_deficit = max_annual_deficit(rec);
  r.si = sustainability_index(r.rel, r.res, r.vul, r.max_deficit);
  return r;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "year,month,storage,release,spill,deficit,power_gwh,reward\n";
  for (const auto& m : traj) {
    out << m.year << ',' << m.month << ',' << text::fixed(m.storage, 6) << ','
        << text::fixed(m.release, 6) << ',' << text::fixed(m.spill, 6) << ','
        << text::fixed(m.deficit, 6) << ',' << text::fixed(m.power_gwh, 6) << ','
        << text::fixed(m.reward, 6) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in, const env::MonthArray& demand) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  Trajectory traj;
  const auto bad = [&](const std::string& what) {
    throw Error(Errc::MalformedRow, "trajectory line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "year,month,storage,release,spill,deficit,power_gwh,reward") bad("unexpected header");
      header = true;
      continue;
    }
    const auto f = text::split(t, ',');
    if (f.size() != 8) bad("expected 8 fields");
    const auto year = text::parse_int(f[0]);
    const auto month = text::parse_int(f[1]);
    if (!year || !month || *month < 1 || *month > 12) bad("bad year or month");
    MonthRecord m;
    m.year = static_cast<int>(*year);
    m.month = static_cast<int>(*month);
    double* slots[] = {&m.storage, &m.release, &m.spill, &m.deficit, &m.power_gwh, &m.reward};
    for (std::size_t k = 0; k < 6; ++k) {
      const auto v = text::parse_double(f[k + 2]);
      if (!v) bad("non-numeric field " + std::to_string(k + 3));
      *slots[k] = *v;
    }
    m.demand = demand[static_cast<std::size_t>(hydrology::water_month_index(m.month))];
    if (!traj.empty()) {
      const auto expect = hydrology::YearMonth{traj.back().year, traj.back().month}.next();
      if (expect.year != m.year || expect.month != m.month) bad("months are not contiguous");
    }
    traj.push_back(m);
  }
  if (!header) throw Error(Errc::MalformedRow, "trajectory has no header");
  return traj;
}

void write_report_header(std::ostream& out) {
  out << "method,rel,res,vul,max_deficit,si,avg_annual_power_gwh,cum_reward\n";
}

void write_report_row(std::ostream& out, const std::string& method, const PerformanceReport& r) {
  out << method << ',' << text::fixed(r.rel, 6) << ',' << text::fixed(r.res, 6) << ','
      << text::general(r.vul, 6) << ',' << text::fixed(r.max_deficit, 6) << ','
      << text::fixed(r.si, 6) << ',' << text::fixed(r.avg_annual_power_gwh, 3) << ','
      << text::fixed(r.cum_reward, 3) << '\n';
}

}  // namespace respg::metrics
