#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twirlbench {

enum class ErrorCode {
    NonUnitaryInput,
    NonTracePreserving,
    NonCptpChannel,
    InadmissibleInvariants,
    DegenerateGate,
    ParameterOutOfRange,
    UnsupportedLength,
    NonPhysicalTriple,
    MalformedProbabilities,
    InsufficientData,
    FitDiverged,
    ChannelBelowNoiseFloor,
    ParityImbalance,
    InvalidSequenceSpec,
    UnknownGateName,
    MalformedGateFile,
    MalformedNoiseSpec,
    SchemaMismatch,
    IOFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace twirlbench
