#include "twirlbench/error.hpp"

namespace twirlbench {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonUnitaryInput: return "NonUnitaryInput";
        case ErrorCode::NonTracePreserving: return "NonTracePreserving";
        case ErrorCode::NonCptpChannel: return "NonCptpChannel";
        case ErrorCode::InadmissibleInvariants: return "InadmissibleInvariants";
        case ErrorCode::DegenerateGate: return "DegenerateGate";
        case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrorCode::UnsupportedLength: return "UnsupportedLength";
        case ErrorCode::NonPhysicalTriple: return "NonPhysicalTriple";
        case ErrorCode::MalformedProbabilities: return "MalformedProbabilities";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::ChannelBelowNoiseFloor: return "ChannelBelowNoiseFloor";
        case ErrorCode::ParityImbalance: return "ParityImbalance";
        case ErrorCode::InvalidSequenceSpec: return "InvalidSequenceSpec";
        case ErrorCode::UnknownGateName: return "UnknownGateName";
        case ErrorCode::MalformedGateFile: return "MalformedGateFile";
        case ErrorCode::MalformedNoiseSpec: return "MalformedNoiseSpec";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::IOFailure: return "IOFailure";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace twirlbench
