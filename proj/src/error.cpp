#include "respg/error.hpp"

namespace respg {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonContiguousMonths: return "NonContiguousMonths";
    case Errc::NegativeFlow: return "NegativeFlow";
    case Errc::InsufficientYears: return "InsufficientYears";
    case Errc::NonPositiveFlowUnderLog: return "NonPositiveFlowUnderLog";
    case Errc::DegenerateStats: return "DegenerateStats";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::OutOfTable: return "OutOfTable";
    case Errc::FlowExceedsTurbine: return "FlowExceedsTurbine";
    case Errc::StorageOutOfBounds: return "StorageOutOfBounds";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::CheckpointUnreadable: return "CheckpointUnreadable";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroDemand: return "ZeroDemand";
    case Errc::PartialYear: return "PartialYear";
    case Errc::FactorOutOfRange: return "FactorOutOfRange";
    case Errc::NoInputs: return "NoInputs";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace respg
