// Batch commands behind the melred executable. Each command reads its inputs,
// writes requested files and returns what should go to stdout/stderr, so the
// whole surface is testable without spawning processes.

#ifndef MELRED_CLI_H_
#define MELRED_CLI_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "melred/baseline_metrics.h"
#include "melred/postprocess.h"
#include "melred/reduction_graph.h"

namespace melred {

enum class InputKind { kAuto, kJson, kMidi };
enum class OutputFormat { kJson, kMidi, kAsciiRoll, kTable };

/// Environment variable naming a default config file.
inline constexpr const char* kConfigEnvVar = "MELRED_CONFIG";

struct RunConfig {
  // Files or directories (scanned for .json/.mid/.midi, sorted by name).
  std::vector<std::string> inputs;
  InputKind kind = InputKind::kAuto;
  // Chord sidecar for MIDI input; default is the input path with a .csv extension.
  std::optional<std::string> chords_path;
  std::optional<std::size_t> track;
  CostConfig cost;
  std::uint64_t seed = 0;
  bool protect_endpoints = true;
  Rational anticipation_window{1, 2};
  ChordRounding rounding = ChordRounding::kStrict;
  DsObsOptions ds_obs;
  std::size_t k = 1;
  // Unset means the command's default (json, json, table, ascii-roll).
  std::optional<OutputFormat> format;
  // Empty writes to stdout. With several inputs this names a directory.
  std::string out;
  bool debug_dumps = false;
  std::size_t workers = 1;
};

/// Overlays a flat JSON config: cost keys (see cost_config_from_json) plus
/// "seed", "k", "protect_endpoints", "anticipation_window", "chord_rounding",
/// "workers". Throws std::invalid_argument on bad keys or values.
RunConfig apply_config(RunConfig base, const nlohmann::json& config);

std::optional<OutputFormat> output_format_from_string(const std::string& name);

struct CommandResult {
  // 0 success, 1 some phrases or files failed, 2 nothing usable.
  int exit_code = 0;
  std::string out;
  std::string err;
};

CommandResult cmd_reduce(const RunConfig& cfg);
CommandResult cmd_baseline(const RunConfig& cfg);
CommandResult cmd_compare(const RunConfig& cfg);
CommandResult cmd_render(const RunConfig& cfg);

}  // namespace melred

#endif  // MELRED_CLI_H_
