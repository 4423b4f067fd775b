#pragma once

#include <stdexcept>
#include <string>

namespace mixhit {

enum class Errc {
    NotStochastic,
    NotIrreducible,
    NotReversible,
    NotSymmetric,
    Disconnected,
    NotLumpable,
    AbsorbingState,
    EmptyConditioning,
    EigenFailure,
    NegativeTime,
    NumericalBreakdown,
    DimensionMismatch,
    InvalidDistribution,
    ZeroStationaryMass,
    EpsOutOfRange,
    POutOfRange,
    EmptyTarget,
    TooLargeForExact,
    EmptyCandidateFamily,
    NotBirthDeath,
    IndexOutOfRange,
    InfeasibleW,
    ExactModeRequired,
    UnknownFamily,
    BadParams,
    InvalidArgument,
    ParseError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace mixhit
