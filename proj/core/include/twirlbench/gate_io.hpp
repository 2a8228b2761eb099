#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "twirlbench/pauli_algebra.hpp"

namespace twirlbench {

inline constexpr std::string_view kVersion = "0.1.0";

/// Names understood by gate_by_name: identity, cnot, cz, swap, iswap,
/// sqrt_swap, w_special, plus the parameterized forms w_lambda:<l> and
/// canonical:<cx>,<cy>,<cz>.
std::vector<std::string> registered_gate_names();

/// Throws UnknownGateName (also for unparsable parameters).
TwoQubitUnitary gate_by_name(std::string_view name);

/// Gate file: {"matrix": [[[re, im], x4] x4]}. Throws MalformedGateFile, or
/// NonUnitaryInput when the matrix parses but is not unitary.
TwoQubitUnitary parse_gate_json(std::string_view text);
std::string gate_to_json(const TwoQubitUnitary& u);

/// A registry name, or otherwise a path to a gate file.
TwoQubitUnitary resolve_gate(std::string_view source);

}  // namespace twirlbench
