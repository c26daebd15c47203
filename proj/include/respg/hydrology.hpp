#pragma once

// Monthly inflow records: CSV ingestion, unit conversion, monthly log-space
// statistics and a Kirsch-style two-matrix synthetic generator.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace respg::hydrology {

inline constexpr int kMonthsPerYear = 12;

// Water-year month index: October = 0 ... September = 11.
constexpr int water_month_index(int calendar_month) noexcept {
  return (calendar_month + 2) % kMonthsPerYear;
}
constexpr int calendar_month(int water_month) noexcept {
  return (water_month + 9) % kMonthsPerYear + 1;
}

struct YearMonth {
  int year = 0;   // calendar year
  int month = 1;  // calendar month 1..12

  YearMonth next() const noexcept {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
  }
  YearMonth plus(std::size_t months) const noexcept;
  friend bool operator==(const YearMonth&, const YearMonth&) = default;
};

// Monthly inflow volumes in TAF/month starting at `start`.
struct FlowSeries {
  YearMonth start;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  YearMonth at(std::size_t k) const noexcept { return start.plus(k); }
  int month_index(std::size_t k) const noexcept { return water_month_index(at(k).month); }
};

// Header `year,month,flow_taf`; blank lines and lines starting with '#' are
// skipped. Throws MalformedRow, NonContiguousMonths or NegativeFlow.
FlowSeries load_flow_csv(std::istream& in);
FlowSeries load_flow_file(const std::filesystem::path& path);

// Writes `# seed=<n>` first when a seed is given.
void write_flow_csv(std::ostream& out, const FlowSeries& series,
                    std::optional<std::uint64_t> seed = std::nullopt);

double cfs_to_taf(double cfs, double days) noexcept;
double taf_to_cfs(double taf, double days) noexcept;

using YearRow = std::array<double, kMonthsPerYear>;

// Whole water years (Oct..Sep) of the series; partial leading and trailing
// years are dropped. first_year receives the calendar year of the first
// October used.
std::vector<YearRow> whole_water_years(const FlowSeries& series, int* first_year = nullptr);

// Square dense matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
  static Matrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return a_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return a_[r * n_ + c]; }

  Matrix multiply_transpose() const;  // this * this^T

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct MonthlyStats {
  YearRow mean{};  // per-month mean of (log) flows
  YearRow std{};   // per-month sample standard deviation (n - 1)
  Matrix within;   // 12x12 Pearson correlation, Oct..Sep
  Matrix crossing; // 12x12 Pearson correlation over Jul(y)..Jun(y+1) windows
  bool log_transform = true;
  std::size_t years = 0;
};

// Requires >= 3 whole water years. Throws InsufficientYears,
// NonPositiveFlowUnderLog, DegenerateStats (a month with zero variance).
MonthlyStats monthly_statistics(const FlowSeries& series, bool log_transform = true);

// Lower-triangular L with L L^T = m. Retries with 1e-10 I jitter added up to
// three times before throwing NotPositiveDefinite.
Matrix cholesky_factor(const Matrix& m);

// Month positions of the crossing window: positions 0..2 are Jul..Sep of
// year y, positions 3..11 are Oct..Jun of year y + 1.
constexpr int crossing_window_month(int position) noexcept { return (position + 9) % 12; }

struct SyntheticGenConfig {
  std::size_t years = 100;
  std::uint64_t seed = 1;
  bool log_transform = true;
};

// Generated series starts in October of the history's first whole water year.
FlowSeries generate_synthetic_flows(const MonthlyStats& stats, const SyntheticGenConfig& cfg,
                                    const FlowSeries& history);

// Sidecar: one row per month with moments and both correlation rows.
void write_stats_csv(std::ostream& out, const MonthlyStats& stats);

}  // namespace respg::hydrology
