// melred: reduce melodies, run the downsampling baseline, compare and render.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "melred/cli.h"

namespace {

struct Flags {
  std::vector<std::string> inputs;
  std::string kind = "auto";
  std::string config;
  std::string chords;
  std::optional<std::size_t> track;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> eta;
  std::optional<int> d_measures;
  std::string out;
  std::string format;
  bool debug_dumps = false;
  std::optional<std::size_t> workers;
  bool no_protect = false;
  bool count_mode = false;
  bool rest_windows = false;
  bool round_chords = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("-i,--input", f.inputs, "Input files or directories")->required();
  cmd->add_option("--kind", f.kind, "Input kind")->check(CLI::IsMember({"auto", "json", "midi"}));
  cmd->add_option("--config", f.config, "JSON config file (default: $MELRED_CONFIG)");
  cmd->add_option("--chords", f.chords, "Chord CSV sidecar for MIDI input");
  cmd->add_option("--track", f.track, "MIDI track index holding the melody");
  cmd->add_option("--seed", f.seed, "Seed for omitting notes from overfull chord bins");
  cmd->add_option("--k", f.k, "Number of alternative reductions")->check(CLI::PositiveNumber);
  cmd->add_option("--eta", f.eta, "Temporal cost exponent")->check(CLI::PositiveNumber);
  cmd->add_option("--D-measures", f.d_measures, "Temporal threshold in measures")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output file, or directory when several inputs are given");
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"json", "midi", "ascii-roll", "table"}));
  cmd->add_flag("--debug-dumps", f.debug_dumps, "Include graph, path and bin dumps");
  cmd->add_option("--workers", f.workers, "Files processed concurrently")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-protect-endpoints", f.no_protect, "Let omission drop the first/last note of a bin");
  cmd->add_flag("--count-mode", f.count_mode, "DS-OBS: count notes instead of weighting by duration");
  cmd->add_flag("--rest-windows", f.rest_windows, "DS-OBS: leave empty windows silent instead of sustaining");
  cmd->add_flag("--round-chords", f.round_chords, "Round chord boundaries to whole beats before binning");
}

melred::RunConfig to_run_config(const Flags& f) {
  melred::RunConfig cfg;
  std::string config_path = f.config;
  if (config_path.empty()) {
    if (const char* env = std::getenv(melred::kConfigEnvVar)) config_path = env;
  }
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
    cfg = melred::apply_config(cfg, nlohmann::json::parse(in));
  }
  cfg.inputs = f.inputs;
  cfg.kind = f.kind == "json" ? melred::InputKind::kJson
                              : (f.kind == "midi" ? melred::InputKind::kMidi : melred::InputKind::kAuto);
  if (!f.chords.empty()) cfg.chords_path = f.chords;
  cfg.track = f.track;
  if (f.seed) cfg.seed = *f.seed;
  if (f.k) cfg.k = *f.k;
  if (f.eta) cfg.cost.eta = *f.eta;
  if (f.d_measures) cfg.cost.D_measures = *f.d_measures;
  if (f.workers) cfg.workers = *f.workers;
  if (f.no_protect) cfg.protect_endpoints = false;
  if (f.count_mode) cfg.ds_obs.weighting = melred::ModeWeighting::kCount;
  if (f.rest_windows) cfg.ds_obs.empty_window = melred::EmptyWindow::kRest;
  if (f.round_chords) cfg.rounding = melred::ChordRounding::kNearest;
  if (!f.format.empty()) cfg.format = melred::output_format_from_string(f.format);
  cfg.out = f.out;
  cfg.debug_dumps = f.debug_dumps;
  if (auto problems = cfg.cost.validate(); !problems.empty()) throw std::invalid_argument(problems.front());
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based melody reduction"};
  app.require_subcommand(1);
  Flags flags;
  auto* reduce = app.add_subcommand("reduce", "Reduce each phrase to its structural skeleton");
  auto* baseline = app.add_subcommand("baseline", "Downsample each phrase to half notes (DS-OBS)");
  auto* compare = app.add_subcommand("compare", "Objective proxy metrics: proposed vs DS-OBS");
  auto* render = app.add_subcommand("render", "ASCII piano rolls of originals and reductions");
  for (auto* cmd : {reduce, baseline, compare, render}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  melred::CommandResult result;
  try {
    const melred::RunConfig cfg = to_run_config(flags);
    if (reduce->parsed()) {
      result = melred::cmd_reduce(cfg);
    } else if (baseline->parsed()) {
      result = melred::cmd_baseline(cfg);
    } else if (compare->parsed()) {
      result = melred::cmd_compare(cfg);
    } else {
      result = melred::cmd_render(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "melred: " << e.what() << "\n";
    return 2;
  }
  std::cout << result.out;
  std::cerr << result.err;
  return result.exit_code;
}
