#pragma once

// File writers shared by the commands. Every file starts with a header
// carrying the tool version and the config hash, so a stale output can
// be told apart from a fresh one.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flagcert/dynamics.hpp"

namespace flagcert::cli {

extern const char* const kToolVersion;

struct Provenance {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  /// Budget name/value pairs echoed into every header.
  std::vector<std::pair<std::string, std::string>> budgets;

  /// "flagcert <version> command=<c> config_hash=<h> seed=<s> [k=v ...]".
  std::string line() const;
};

/// 17 significant digits in scientific notation.
std::string csv_number(double x);

class CsvWriter {
 public:
  CsvWriter(const Provenance& provenance, const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Reads the config hash embedded in an output file; nullopt if absent.
std::optional<std::string> embedded_hash(const std::filesystem::path& file);

/// True when the file is missing, carries no hash, or carries another hash.
bool is_stale(const std::filesystem::path& file, const std::string& config_hash);

void write_file(const std::filesystem::path& path, const std::string& text);

/// Scatter plot of a cloud in RP^1 (circle model) or RP^2 (affine chart
/// about the mean direction). Throws DimensionMismatch for d > 3.
std::string render_svg(const LimitSetCloud& cloud, const Provenance& provenance);

}  // namespace flagcert::cli
