#include "respg/baselines.hpp"

#include <algorithm>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "respg/error.hpp"
#include "respg/rng.hpp"
#include "respg/text.hpp"

namespace respg::baselines {

SopResult sop_release(const SopInputs& in) noexcept {
  SopResult r;
  const double usable = std::max(0.0, in.available - in.floor);
  if (usable <= in.demand) {
    r.release = usable;
  } else if (in.available - in.demand <= in.capacity) {
    r.release = in.demand;
  } else {
    r.release = in.demand;
    r.spill = in.available - in.demand - in.capacity;
  }
  r.end_storage = in.available - r.release - r.spill;
  return r;
}

Policy sop_policy(const env::ReservoirSpec& spec) {
  return [&spec](const PolicyContext& ctx) {
    const int next = (ctx.state.month_index + 1) % env::kMonths;
    const double evap = env::charged_evaporation(ctx.state, ctx.inflow, spec);
    const SopInputs in{ctx.state.storage + ctx.inflow - evap,
                       spec.demand[static_cast<std::size_t>(ctx.state.month_index)],
                       spec.rule_curve[static_cast<std::size_t>(next)], spec.min_storage};
    return sop_release(in).release;
  };
}

Policy random_policy(const env::ReservoirSpec& spec, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed, 0x72616e64);
  return [&spec, rng](const PolicyContext&) { return env::action_to_release(rng->uniform(), spec); };
}

Policy agent_policy(const agents::Agent& agent, const env::ReservoirSpec& spec) {
  return [&agent, &spec](const PolicyContext& ctx) {
    return env::action_to_release(agent.evaluate_action(ctx.obs.as_array()), spec);
  };
}

RunResult run_policy(const Policy& policy, const env::ReservoirSpec& spec,
                     const hydrology::FlowSeries& flows) {
  spec.validate();
  if (flows.size() == 0 || flows.size() % hydrology::kMonthsPerYear != 0 ||
      flows.start.month != 10)
    throw Error(Errc::PartialYear, "inflow series must start in October and cover whole water years");
  RunResult result;
  result.trajectory.reserve(flows.size());
  auto state = env::reset(spec, spec.initial_storage, 0);
  for (std::size_t t = 0; t < flows.size(); ++t) {
    const auto obs = env::encode_observation(state, spec);
    const double inflow = flows.values[t];
    const double request = policy(PolicyContext{state, obs, inflow, t});
    const auto out = env::step_release(state, request, inflow, spec);
    if (out.release != request) ++result.clipped;
    const auto ym = flows.at(t);
    metrics::MonthRecord m;
    m.year = ym.year;
    m.month = ym.month;
    m.storage = out.next.storage;
    m.release = out.release;
    m.spill = out.spill;
    m.deficit = out.deficit;
    m.power_gwh = out.power_gwh;
    m.reward = out.reward;
    m.demand = spec.demand[static_cast<std::size_t>(state.month_index)];
    result.trajectory.push_back(m);
    state = out.next;
  }
  return result;
}

RunResult run_replay(const std::vector<double>& releases, const env::ReservoirSpec& spec,
                     const hydrology::FlowSeries& flows) {
  if (releases.size() != flows.size())
    throw Error(Errc::LengthMismatch, "replay has " + std::to_string(releases.size()) +
                                          " months, inflow series has " +
                                          std::to_string(flows.size()));
  return run_policy([&releases](const PolicyContext& ctx) { return releases[ctx.t]; }, spec, flows);
}

ReleaseSeries load_release_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  ReleaseSeries out;
  hydrology::YearMonth prev{};
  const auto bad = [&](Errc code, const std::string& what) {
    throw Error(code, "release line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "year,month,release_taf") bad(Errc::MalformedRow, "expected header year,month,release_taf");
      header = true;
      continue;
    }
    const auto f = text::split(t, ',');
    if (f.size() != 3) bad(Errc::MalformedRow, "expected 3 fields");
    const auto year = text::parse_int(f[0]);
    const auto month = text::parse_int(f[1]);
    const auto value = text::parse_double(f[2]);
    if (!year || !month || !value || *month < 1 || *month > 12)
      bad(Errc::MalformedRow, "unparseable row");
    const hydrology::YearMonth ym{static_cast<int>(*year), static_cast<int>(*month)};
    if (out.values.empty())
      out.start = ym;
    else if (!(prev.next() == ym))
      bad(Errc::NonContiguousMonths, "months are not contiguous");
    if (*value < 0.0) bad(Errc::MalformedRow, "negative release");
    out.values.push_back(*value);
    prev = ym;
  }
  if (out.values.empty()) throw Error(Errc::MalformedRow, "release file has no data rows");
  return out;
}

void write_release_csv(std::ostream& out, const metrics::Trajectory& traj) {
  out << "year,month,release_taf\n";
  for (const auto& m : traj) out << m.year << ',' << m.month << ',' << text::fixed(m.release, 6) << '\n';
}

std::vector<double> align_releases(const ReleaseSeries& rel, const hydrology::FlowSeries& flows) {
  if (!(rel.start == flows.start) || rel.values.size() != flows.size())
    throw Error(Errc::LengthMismatch, "release series does not cover the same months as the inflows");
  return rel.values;
}

}  // namespace respg::baselines
