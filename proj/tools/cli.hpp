#pragma once

#include <string>
#include <vector>

namespace btv::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Environment variable consulted when --out is not given.
inline constexpr const char* kOutDirEnv = "BTV_OUT_DIR";

/// Runs one CLI invocation; args exclude the program name. Errors are
/// reported on stderr as {"error":{"category":...,"message":...}}.
int run_cli(const std::vector<std::string>& args);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace btv::cli
