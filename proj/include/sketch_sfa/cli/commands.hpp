#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sketch_sfa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,       // a library Error; its step is printed
  kExitUsage = 2,         // bad arguments or configuration
  kExitVerification = 3,  // a required check failed or a replay diverged
};

/// Overrides used when a manifest is replayed.
struct Invocation {
  /// Config text to use instead of reading --config from disk.
  std::optional<std::string> config_text;
  /// Where to write this run's manifest instead of next to its output.
  std::optional<std::string> manifest_path;
};

/// Runs one command line (arguments after the program name).
///
///   gen-data --kind blobs|wiskott-signal|low-rank --out data.csv
///   run exact --in data.csv --labels --J 2 --out result.json
///   run qi --in data.csv --labels --J 2 --eps-target 0.2 --out model.json
///   run verify --suite all --out report.jsonl
///   run bench --n-grid 4096,16384,65536 --out bench.csv
///   replay --manifest model.json.manifest.json
///
/// Every command except replay writes `<out>.manifest.json`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Invocation& invocation = {});

}  // namespace sketch_sfa::cli
