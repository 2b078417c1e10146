#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cadrobot::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // usage, I/O, parse or validation failure
inline constexpr int kExitLint = 2;     // workspace lint failures under --strict
inline constexpr int kExitAborted = 3;  // simulation aborted (partial trace written)

/// Run the command line `args` (without the executable name).  Program text,
/// traces and manifests go to files; diagnostics and errors go to `err`, one
/// line each, prefixed "error: <category>: " or "warning: <category>: ".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a digest, used to fingerprint inputs and outputs in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

std::string tool_version();

}  // namespace cadrobot::cli
