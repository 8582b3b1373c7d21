#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spk {

enum class ErrorCode {
    NotStochastic,
    Reducible,
    ZeroStationaryMass,
    DimensionMismatch,
    ToleranceTooLoose,
    AlphaExceedsHolding,
    AlphaOutOfRange,
    EmptySubset,
    EigensolveFailure,
    TooLarge,
    NonpositiveProfile,
    EpsilonTooLarge,
    ZeroHolding,
    ReducibleSymmetrization,
    NotReversible,
    RegularityFailed,
    GridTooCoarse,
    Periodic,
    NoConvergenceInWindow,
    InvalidBlock,
    DegenerateGenerators,
    SizeCap,
    ParseError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure path carries one of the codes above
/// so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace spk
