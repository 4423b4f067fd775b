#include "mixhit/error.hpp"

namespace mixhit {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NotStochastic: return "NotStochastic";
        case Errc::NotIrreducible: return "NotIrreducible";
        case Errc::NotReversible: return "NotReversible";
        case Errc::NotSymmetric: return "NotSymmetric";
        case Errc::Disconnected: return "Disconnected";
        case Errc::NotLumpable: return "NotLumpable";
        case Errc::AbsorbingState: return "AbsorbingState";
        case Errc::EmptyConditioning: return "EmptyConditioning";
        case Errc::EigenFailure: return "EigenFailure";
        case Errc::NegativeTime: return "NegativeTime";
        case Errc::NumericalBreakdown: return "NumericalBreakdown";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InvalidDistribution: return "InvalidDistribution";
        case Errc::ZeroStationaryMass: return "ZeroStationaryMass";
        case Errc::EpsOutOfRange: return "EpsOutOfRange";
        case Errc::POutOfRange: return "POutOfRange";
        case Errc::EmptyTarget: return "EmptyTarget";
        case Errc::TooLargeForExact: return "TooLargeForExact";
        case Errc::EmptyCandidateFamily: return "EmptyCandidateFamily";
        case Errc::NotBirthDeath: return "NotBirthDeath";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::InfeasibleW: return "InfeasibleW";
        case Errc::ExactModeRequired: return "ExactModeRequired";
        case Errc::UnknownFamily: return "UnknownFamily";
        case Errc::BadParams: return "BadParams";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace mixhit
