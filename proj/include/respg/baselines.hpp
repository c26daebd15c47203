#pragma once

// Reference policies and the closed-loop simulation driver shared with
// trained agents.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "respg/agents.hpp"
#include "respg/hydrology.hpp"
#include "respg/metrics.hpp"
#include "respg/reservoir_env.hpp"

namespace respg::baselines {

struct SopInputs {
  double available = 0.0;  // W = S + Q - E
  double demand = 0.0;     // D
  double capacity = 0.0;   // C, allowable end-of-month storage
  double floor = 0.0;      // S_min
};

struct SopResult {
  double release = 0.0;
  double spill = 0.0;
  double end_storage = 0.0;
};

// Meet demand when possible, drain to the floor when short, spill above C.
SopResult sop_release(const SopInputs& in) noexcept;

struct PolicyContext {
  const env::EnvState& state;
  const env::Observation& obs;
  double inflow;
  std::size_t t;  // month offset from the start of the run
};

// Returns the requested release in TAF.
using Policy = std::function<double(const PolicyContext&)>;

Policy sop_policy(const env::ReservoirSpec& spec);
// Uniform normalized action, seeded.
Policy random_policy(const env::ReservoirSpec& spec, std::uint64_t seed);
// Deterministic evaluation action of the agent; sees only the observation.
Policy agent_policy(const agents::Agent& agent, const env::ReservoirSpec& spec);

struct RunResult {
  metrics::Trajectory trajectory;
  std::size_t clipped = 0;  // months where the executed release differed from the request
};

// Steps the environment from spec.initial_storage in October over the
// series, which must start in October and cover whole water years
// (PartialYear otherwise).
RunResult run_policy(const Policy& policy, const env::ReservoirSpec& spec,
                     const hydrology::FlowSeries& flows);

// Recorded releases aligned month-by-month with `flows`. Throws LengthMismatch.
RunResult run_replay(const std::vector<double>& releases, const env::ReservoirSpec& spec,
                     const hydrology::FlowSeries& flows);

struct ReleaseSeries {
  hydrology::YearMonth start;
  std::vector<double> values;
};

// Header `year,month,release_taf`, contiguous months. Throws MalformedRow,
// NonContiguousMonths.
ReleaseSeries load_release_csv(std::istream& in);
void write_release_csv(std::ostream& out, const metrics::Trajectory& traj);

// Aligns to `flows`; throws LengthMismatch when start or length differ.
std::vector<double> align_releases(const ReleaseSeries& rel, const hydrology::FlowSeries& flows);

}  // namespace respg::baselines
