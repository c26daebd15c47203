#include "respg/hydrology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "respg/error.hpp"
#include "respg/rng.hpp"
#include "respg/text.hpp"

namespace respg::hydrology {

namespace {

constexpr double kSecondsPerDay = 86400.0;
constexpr double kCubicFeetPerAcreFoot = 43560.0;
constexpr int kJitterAttempts = 3;
constexpr double kJitter = 1e-10;
constexpr std::uint64_t kGeneratorStream = 0x68796472;  // "hydr"

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

Matrix correlation_of_columns(const std::vector<YearRow>& rows) {
  Matrix out(kMonthsPerYear);
  std::vector<std::vector<double>> cols(kMonthsPerYear, std::vector<double>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int m = 0; m < kMonthsPerYear; ++m) cols[m][r] = rows[r][m];
  for (int i = 0; i < kMonthsPerYear; ++i) {
    out(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c = pearson(cols[i], cols[j]);
      out(i, j) = c;
      out(j, i) = c;
    }
  }
  return out;
}

std::vector<YearRow> standardize(const std::vector<YearRow>& rows, const MonthlyStats& stats) {
  std::vector<YearRow> z(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int m = 0; m < kMonthsPerYear; ++m) {
      const double x = stats.log_transform ? std::log(rows[r][m]) : rows[r][m];
      z[r][m] = (x - stats.mean[m]) / stats.std[m];
    }
  }
  return z;
}

YearRow lower_multiply(const Matrix& l, const YearRow& w) {
  YearRow out{};
  for (int i = 0; i < kMonthsPerYear; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += l(i, j) * w[j];
    out[i] = s;
  }
  return out;
}

YearRow forward_substitute(const Matrix& l, const YearRow& z) {
  YearRow w{};
  for (int i = 0; i < kMonthsPerYear; ++i) {
    double s = z[i];
    for (int j = 0; j < i; ++j) s -= l(i, j) * w[j];
    w[i] = s / l(i, i);
  }
  return w;
}

[[noreturn]] void row_error(Errc code, std::size_t line, const std::string& detail) {
  throw Error(code, "line " + std::to_string(line) + ": " + detail);
}

}  // namespace

YearMonth YearMonth::plus(std::size_t months) const noexcept {
  const long long total = static_cast<long long>(year) * 12 + (month - 1) +
                          static_cast<long long>(months);
  return YearMonth{static_cast<int>(total / 12), static_cast<int>(total % 12) + 1};
}

FlowSeries load_flow_csv(std::istream& in) {
  FlowSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  YearMonth expected{};
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      if (t != "year,month,flow_taf")
        row_error(Errc::MalformedRow, line_no, "expected header year,month,flow_taf");
      header_seen = true;
      continue;
    }
    const auto fields = text::split(t, ',');
    if (fields.size() != 3) row_error(Errc::MalformedRow, line_no, "expected 3 fields");
    const auto year = text::parse_int(fields[0]);
    const auto month = text::parse_int(fields[1]);
    const auto flow = text::parse_double(fields[2]);
    if (!year || !month || !flow || *month < 1 || *month > 12 || !std::isfinite(*flow))
      row_error(Errc::MalformedRow, line_no, "unparseable row '" + std::string(t) + "'");
    if (*flow < 0.0) row_error(Errc::NegativeFlow, line_no, "negative flow");
    const YearMonth ym{static_cast<int>(*year), static_cast<int>(*month)};
    if (series.values.empty()) {
      series.start = ym;
    } else if (!(ym == expected)) {
      row_error(Errc::NonContiguousMonths, line_no,
                "expected " + std::to_string(expected.year) + "-" +
                    std::to_string(expected.month));
    }
    expected = ym.next();
    series.values.push_back(*flow);
  }
  if (!header_seen) throw Error(Errc::MalformedRow, "missing header");
  if (series.values.empty()) throw Error(Errc::MalformedRow, "no data rows");
  return series;
}

FlowSeries load_flow_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return load_flow_csv(in);
}

void write_flow_csv(std::ostream& out, const FlowSeries& series,
                    std::optional<std::uint64_t> seed) {
  if (seed) out << "# seed=" << *seed << '\n';
  out << "year,month,flow_taf\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto ym = series.at(k);
    out << ym.year << ',' << ym.month << ',' << text::fixed(series.values[k], 6) << '\n';
  }
}

double cfs_to_taf(double cfs, double days) noexcept {
  return cfs * days * kSecondsPerDay / kCubicFeetPerAcreFoot / 1000.0;
}

double taf_to_cfs(double taf, double days) noexcept {
  return taf * 1000.0 * kCubicFeetPerAcreFoot / (days * kSecondsPerDay);
}

std::vector<YearRow> whole_water_years(const FlowSeries& series, int* first_year) {
  std::size_t k = 0;
  while (k < series.size() && series.month_index(k) != 0) ++k;
  std::vector<YearRow> rows;
  if (first_year) *first_year = series.at(k).year;
  for (; k + kMonthsPerYear <= series.size(); k += kMonthsPerYear) {
    YearRow row{};
    for (int m = 0; m < kMonthsPerYear; ++m) row[m] = series.values[k + m];
    rows.push_back(row);
  }
  return rows;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::multiply_transpose() const {
  Matrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) s += (*this)(i, k) * (*this)(j, k);
      out(i, j) = s;
    }
  return out;
}

MonthlyStats monthly_statistics(const FlowSeries& series, bool log_transform) {
  const auto rows = whole_water_years(series);
  if (rows.size() < 3)
    throw Error(Errc::InsufficientYears,
                "need >= 3 whole water years, have " + std::to_string(rows.size()));

  MonthlyStats stats;
  stats.log_transform = log_transform;
  stats.years = rows.size();
  const auto n = static_cast<double>(rows.size());
  for (int m = 0; m < kMonthsPerYear; ++m) {
    double sum = 0.0;
    for (const auto& row : rows) {
      if (log_transform && !(row[m] > 0.0))
        throw Error(Errc::NonPositiveFlowUnderLog,
                    "month index " + std::to_string(m) + " has a non-positive flow");
      sum += log_transform ? std::log(row[m]) : row[m];
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& row : rows) {
      const double d = (log_transform ? std::log(row[m]) : row[m]) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
      throw Error(Errc::DegenerateStats, "month index " + std::to_string(m) + " has zero variance");
    stats.mean[m] = mean;
    stats.std[m] = sd;
  }

  const auto z = standardize(rows, stats);
  stats.within = correlation_of_columns(z);

  std::vector<YearRow> windows(z.size() - 1);
  for (std::size_t y = 0; y + 1 < z.size(); ++y)
    for (int p = 0; p < kMonthsPerYear; ++p)
      windows[y][p] = p < 3 ? z[y][crossing_window_month(p)] : z[y + 1][crossing_window_month(p)];
  stats.crossing = correlation_of_columns(windows);
  return stats;
}

Matrix cholesky_factor(const Matrix& m) {
  const std::size_t n = m.size();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < r; ++c)
      if (std::abs(m(r, c) - m(c, r)) > 1e-12 * std::max(1.0, std::abs(m(r, c))))
        throw Error(Errc::NotPositiveDefinite, "matrix is not symmetric");

  Matrix work = m;
  for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
    Matrix l(n);
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      double d = work(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
      if (!(d > 0.0)) {
        ok = false;
        break;
      }
      l(j, j) = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = work(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / l(j, j);
      }
    }
    if (ok) return l;
    for (std::size_t i = 0; i < n; ++i) work(i, i) += kJitter;
  }
  throw Error(Errc::NotPositiveDefinite, "factorization failed after jitter");
}

FlowSeries generate_synthetic_flows(const MonthlyStats& stats, const SyntheticGenConfig& cfg,
                                    const FlowSeries& history) {
  if (cfg.years < 1) throw Error(Errc::ConfigInvalid, "years must be >= 1");
  int first_year = 0;
  const auto rows = whole_water_years(history, &first_year);
  if (rows.size() < 3) throw Error(Errc::InsufficientYears, "history too short");

  const Matrix lw = cholesky_factor(stats.within);
  const Matrix lc = cholesky_factor(stats.crossing);

  // Whitened standardized history: bootstrapping these month-by-month keeps
  // unit variance and removes the historical cross-month structure, which
  // the factors then reimpose.
  const auto z_hist = standardize(rows, stats);
  std::vector<YearRow> white(z_hist.size());
  for (std::size_t r = 0; r < z_hist.size(); ++r) white[r] = forward_substitute(lw, z_hist[r]);

  Rng rng(cfg.seed, kGeneratorStream);
  const std::size_t n = cfg.years;
  std::vector<YearRow> draws(n);
  for (auto& row : draws)
    for (int m = 0; m < kMonthsPerYear; ++m) row[m] = white[rng.index(white.size())][m];

  FlowSeries out;
  out.start = YearMonth{first_year, 10};
  out.values.reserve(n * kMonthsPerYear);
  for (std::size_t y = 0; y < n; ++y) {
    YearRow z = lower_multiply(lw, draws[y]);
    if (y > 0) {
      YearRow window{};
      for (int p = 0; p < kMonthsPerYear; ++p)
        window[p] = p < 3 ? draws[y - 1][crossing_window_month(p)]
                          : draws[y][crossing_window_month(p)];
      const YearRow zc = lower_multiply(lc, window);
      // Jan..Jun (window positions 6..11) carry the year-to-year structure.
      for (int p = 6; p < kMonthsPerYear; ++p) z[crossing_window_month(p)] = zc[p];
    }
    for (int m = 0; m < kMonthsPerYear; ++m) {
      const double x = stats.mean[m] + stats.std[m] * z[m];
      out.values.push_back(stats.log_transform ? std::exp(x) : std::max(0.0, x));
    }
  }
  return out;
}

void write_stats_csv(std::ostream& out, const MonthlyStats& stats) {
  out << "month,mean,std";
  for (int j = 0; j < kMonthsPerYear; ++j) out << ",within_" << j;
  for (int j = 0; j < kMonthsPerYear; ++j) out << ",crossing_" << j;
  out << '\n';
  for (int m = 0; m < kMonthsPerYear; ++m) {
    out << calendar_month(m) << ',' << text::general(stats.mean[m], 12) << ','
        << text::general(stats.std[m], 12);
    for (int j = 0; j < kMonthsPerYear; ++j) out << ',' << text::fixed(stats.within(m, j), 6);
    for (int j = 0; j < kMonthsPerYear; ++j) out << ',' << text::fixed(stats.crossing(m, j), 6);
    out << '\n';
  }
}

}  // namespace respg::hydrology
