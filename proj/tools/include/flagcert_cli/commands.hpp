#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flagcert::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool skip_certify = false;
  std::string out_dir = "flagcert_out";
  bool svg = false;
};

const std::vector<std::string>& command_names();

/// Runs one command and maps errors onto the exit-code contract: 2 for
/// unusable input, 1 for a failed certification or computation.
int run_command(std::string_view name, const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace flagcert::cli
