#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fundlim/norm_order.hpp"

namespace fundlim::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes; each has exactly one meaning.
enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInputError = 2,
  kCertificationFailed = 3,
  kUnstableLoop = 4,
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::vector<NormOrder> orders;
  std::optional<std::size_t> grid;
  /// Returns the manifest timestamp; replaceable for tests.
  std::function<std::string()> clock;
};

struct CommandOutput {
  int exit_code = kSuccess;
  nlohmann::json report;
  /// Extra file artifacts written under --out: name -> contents.
  std::vector<std::pair<std::string, std::string>> files;
};

CommandOutput cmd_analyze(const std::filesystem::path& plant_file, const GlobalOptions& opts);

/// Omitting the plant selects the generic-plant bound.
CommandOutput cmd_bound(const std::optional<std::filesystem::path>& plant_file,
                        const std::filesystem::path& dist_file, const std::string& theorem,
                        const GlobalOptions& opts);

CommandOutput cmd_verify(const std::filesystem::path& plant_file, const std::filesystem::path& dist_file,
                         const std::string& controller_spec,
                         const std::optional<std::filesystem::path>& config_file, const GlobalOptions& opts);

/// Exactly one of dist_file / spectrum_csv must be set.
CommandOutput cmd_szego(const std::optional<std::filesystem::path>& dist_file,
                        const std::optional<std::filesystem::path>& spectrum_csv, double negentropy,
                        const GlobalOptions& opts);

/// Full command-line entry point. Prints the report JSON to `out`,
/// diagnostics to `err`, and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// ISO-8601 UTC wall clock.
std::string utc_timestamp();

}  // namespace fundlim::cli
