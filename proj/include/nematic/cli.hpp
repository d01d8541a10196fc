#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "nematic/io.hpp"

namespace nematic::cli {

enum ExitCode { ok = 0, validation_failed = 1, size_cap = 2 };

/// Result of one run. `result` always embeds the input config under "config".
/// Table-shaped subcommands (mc, nematic-scan) also fill `csv`; `result` is
/// then the metadata sidecar.
struct Outcome {
  int exit_code = ok;
  json result;
  std::optional<std::string> csv;
  std::string summary;
  std::string error;
};

/// Runs a RunConfig document. Never throws: errors become exit codes with a
/// diagnostic in `error`.
Outcome run(const json& config, int threads = 1);
/// Parses then runs; malformed JSON gives exit code 1.
Outcome run_text(const std::string& text, int threads = 1);

/// Writes the artifacts. With an empty path the artifact goes to `out`;
/// otherwise JSON goes to `path`, or CSV to `path` plus a `path`.json sidecar.
/// Returns false if a file cannot be written.
bool write_outputs(const Outcome& outcome, const std::string& path, std::ostream& out);

/// Explicit value, else NEMATIC_THREADS, else 1.
int resolve_threads(std::optional<int> flag);

}  // namespace nematic::cli
