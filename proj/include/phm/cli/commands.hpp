#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phm::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,           // unreadable/malformed file, bad flags, size mismatch
    kExitClassification = 2,  // spectrum is not PH-admissible at the tolerance
    kExitDegenerate = 3,
    kExitIllConditioned = 4,
    kExitParameter = 5,       // wrong count or zero/invalid metric parameter
    kExitCapExceeded = 6,
    kExitGeneration = 7,      // rejection budget exhausted
    kExitCheckFailed = 8,     // a residual or defect is above its threshold
    kExitNumeric = 9,         // backend failure
};

inline constexpr double kResidualThreshold = 1e-9;
inline constexpr double kHermiticityThreshold = 1e-10;
inline constexpr double kOracleDefectThreshold = 1e-8;
inline constexpr double kMinParameterMagnitude = 1e-6;
inline constexpr std::size_t kEnumerateCap = 20;

/// Runs `phm <args...>`. Exactly one JSON document is written to `out`; diagnostics go
/// to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phm::cli
