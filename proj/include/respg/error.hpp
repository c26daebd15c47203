#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace respg {

// Every failure the library reports carries one of these codes so callers
// (tests, the CLI exit-code mapping) can branch without parsing messages.
enum class Errc {
  // hydrology
  MalformedRow,
  NonContiguousMonths,
  NegativeFlow,
  InsufficientYears,
  NonPositiveFlowUnderLog,
  DegenerateStats,
  NotPositiveDefinite,
  // reservoir_env
  InvalidSpec,
  OutOfTable,
  FlowExceedsTurbine,
  StorageOutOfBounds,
  // neural
  ShapeMismatch,
  CheckpointUnreadable,
  // agents
  InsufficientSamples,
  ConfigInvalid,
  // baselines
  LengthMismatch,
  // metrics
  ZeroDemand,
  PartialYear,
  FactorOutOfRange,
  // cli
  NoInputs,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace respg
