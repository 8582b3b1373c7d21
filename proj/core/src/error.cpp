#include "spk/error.hpp"

namespace spk {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotStochastic: return "NotStochastic";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::ZeroStationaryMass: return "ZeroStationaryMass";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ToleranceTooLoose: return "ToleranceTooLoose";
        case ErrorCode::AlphaExceedsHolding: return "AlphaExceedsHolding";
        case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::EigensolveFailure: return "EigensolveFailure";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::NonpositiveProfile: return "NonpositiveProfile";
        case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
        case ErrorCode::ZeroHolding: return "ZeroHolding";
        case ErrorCode::ReducibleSymmetrization: return "ReducibleSymmetrization";
        case ErrorCode::NotReversible: return "NotReversible";
        case ErrorCode::RegularityFailed: return "RegularityFailed";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::Periodic: return "Periodic";
        case ErrorCode::NoConvergenceInWindow: return "NoConvergenceInWindow";
        case ErrorCode::InvalidBlock: return "InvalidBlock";
        case ErrorCode::DegenerateGenerators: return "DegenerateGenerators";
        case ErrorCode::SizeCap: return "SizeCap";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace spk
