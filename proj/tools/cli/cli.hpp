#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gdivide::cli {

/// Exit codes. Library errors map by kind.
enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kMissingInput = 3,
  kInvariant = 4,
  kNumerical = 5,
  kTransport = 6,
};

/// Runs one subcommand. `args` excludes the program name. Errors are written
/// to `err` as a one-line JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes. Throws FileError.
std::string sha256_file(const std::string& path);

}  // namespace gdivide::cli
