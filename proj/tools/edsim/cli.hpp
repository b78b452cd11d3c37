#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

namespace edsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one edsim invocation. `args` excludes the program name. Returns the
/// process exit code; messages go to `out` and `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// FNV-1a of a file's bytes, as 16 hex digits. Throws ValidationError when
/// the file cannot be read.
std::string file_digest(const std::string& path);

/// The `# manifest <digest> seed=<n>` line that heads every output file.
std::string manifest_comment(std::uint64_t digest, std::uint64_t seed);

}  // namespace edsim
