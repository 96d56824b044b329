#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "shocklab/config.hpp"
#include "shocklab/inequalities.hpp"

namespace shocklab {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitInadmissible = 3,
  kExitNumerical = 4,
  kExitIo = 5,
};

/// $SHOCKLAB_OUT if set, else "runs".
std::filesystem::path default_output_root();

struct RunOptions {
  std::filesystem::path out_root = default_output_root();
  std::optional<std::uint64_t> seed;  ///< overrides [initial] seed
  int threads = 0;                    ///< 0 keeps the OpenMP default
  bool allow_inadmissible = false;
  std::optional<double> t_min;        ///< overrides [fit] t_min
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path run_dir;
  nlohmann::json summary;
  std::string message;
};

/// Pre-flight, simulation and artifacts for one config. Writes under out_root/<name>:
/// manifest.json, diagnostics.csv, summary.json, snapshots/, plot/ and the profile tables.
/// Errors are mapped to exit codes, never thrown.
RunOutcome execute_run(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log);

/// Summary rebuilt from the manifest and diagnostics.csv of a run directory; the same
/// function produces the summary at the end of a run. Throws IoError on missing or corrupt files.
nlohmann::json summarize_run_dir(const std::filesystem::path& run_dir, std::optional<double> t_min = std::nullopt);

/// Hex SHA-256 of the bytes of a file (used for the golden summaries).
std::string sha256_file(const std::filesystem::path& path);

int cmd_run(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify_lemmas(const std::filesystem::path& report_path, const LemmaSuiteOptions& opts, std::ostream& out,
                      std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::optional<double> t_min, std::ostream& out,
               std::ostream& err);

}  // namespace shocklab
