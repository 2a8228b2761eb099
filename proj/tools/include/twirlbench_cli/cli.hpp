#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twirlbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 2;
inline constexpr int kExitNumericalFailure = 3;

/// Runs one invocation with argv[0] omitted. Reports go to `out`, diagnostics
/// to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes via a temporary file in the same directory and renames it into place.
/// Throws IOFailure.
void write_file_atomic(const std::string& path, const std::string& contents);

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double v);

}  // namespace twirlbench::cli
