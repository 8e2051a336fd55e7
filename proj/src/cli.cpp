#include "melred/cli.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "melred/ingest.h"
#include "melred/render.h"

namespace melred {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(std::max<std::size_t>(workers, 1), n); ++w) pool.emplace_back(run);
  run();
  for (std::thread& t : pool) t.join();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IngestError(IngestErrorKind::kIo, "cannot read '" + path + "'");
  return buf.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

bool is_midi_path(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".mid" || ext == ".midi";
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const std::string& input : inputs) {
    std::error_code ec;
    if (fs::is_directory(input, ec)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(input)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        if (p.extension() == ".json" || is_midi_path(p)) found.push_back(p.string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(input);
    }
  }
  return out;
}

std::vector<Phrase> load_phrases(const std::string& path, const RunConfig& cfg) {
  const bool midi = cfg.kind == InputKind::kMidi || (cfg.kind == InputKind::kAuto && is_midi_path(path));
  if (!midi) return parse_leadsheet(read_file(path));

  const std::string bytes = read_file(path);
  const std::string sidecar = cfg.chords_path.value_or(fs::path(path).replace_extension(".csv").string());
  MidiImportOptions options;
  options.track = cfg.track;
  options.id = fs::path(path).stem().string();
  const std::span<const std::uint8_t> data(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
  return import_midi(data, read_file(sidecar), QuantizationConfig{}, options);
}

std::optional<PitchRange> piece_range(const std::vector<Phrase>& phrases) {
  std::optional<PitchRange> range;
  for (const Phrase& p : phrases) {
    if (p.notes.empty()) continue;
    PitchRange r = pitch_range(p);
    range = range ? PitchRange{std::min(range->min, r.min), std::max(range->max, r.max)} : r;
  }
  return range;
}

ReduceOptions reduce_options(const RunConfig& cfg) {
  ReduceOptions o;
  o.anticipation.window = cfg.anticipation_window;
  o.rounding = cfg.rounding;
  o.k = cfg.k;
  return o;
}

OmissionPolicy omission(const RunConfig& cfg) { return {cfg.seed, cfg.protect_endpoints}; }

// One melody (plus metadata) per realized alternative.
struct Alternative {
  ReducedMelody melody;
  std::optional<double> path_cost;
  std::vector<std::size_t> path;
  bool overflowed = false;
};

struct PhraseResult {
  Phrase phrase;
  std::vector<Alternative> alternatives;
  ordered_json debug;
  std::string error;
};

struct FileResult {
  std::string input;
  std::vector<PhraseResult> phrases;
  std::string error;
};

enum class Method { kProposed, kBaseline };

FileResult process_file(const std::string& path, const RunConfig& cfg, Method method) {
  FileResult result;
  result.input = path;
  std::vector<Phrase> phrases;
  try {
    phrases = load_phrases(path, cfg);
  } catch (const std::exception& e) {
    result.error = e.what();
    return result;
  }
  ReduceOptions options = reduce_options(cfg);
  options.pitch_range = piece_range(phrases);
  for (Phrase& phrase : phrases) {
    PhraseResult pr;
    try {
      if (method == Method::kBaseline) {
        pr.alternatives.push_back({ds_obs(phrase, cfg.ds_obs), std::nullopt, {}, false});
      } else {
        Reduction r = reduce_phrase_detailed(phrase, cfg.cost, omission(cfg), options);
        ordered_json paths = ordered_json::array();
        ordered_json bins = ordered_json::array();
        for (const Realization& real : r.realizations) {
          pr.alternatives.push_back({real.melody, real.path.total_cost, real.path.nodes, real.overflowed});
          paths.push_back(path_to_json(real.path, r.graph));
          bins.push_back(bins_to_json(real.bins, real.groups));
        }
        if (cfg.debug_dumps) {
          pr.debug["anticipation"] = r.membership.anticipation;
          pr.debug["chord_of"] = r.membership.chord_index;
          pr.debug["graph"] = graph_to_json(r.graph);
          pr.debug["paths"] = paths;
          pr.debug["bins"] = bins;
        }
      }
    } catch (const std::exception& e) {
      pr.error = e.what();
    }
    pr.phrase = std::move(phrase);
    result.phrases.push_back(std::move(pr));
  }
  return result;
}

std::vector<FileResult> process_all(const std::vector<std::string>& files, const RunConfig& cfg, Method method) {
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), cfg.workers, [&](std::size_t i) { results[i] = process_file(files[i], cfg, method); });
  return results;
}

struct Tally {
  std::size_t ok = 0;
  std::size_t failed = 0;

  int exit_code() const { return failed == 0 ? 0 : (ok == 0 ? 2 : 1); }
};

Tally tally_and_report(const std::vector<FileResult>& results, std::string& err) {
  Tally t;
  for (const FileResult& f : results) {
    if (!f.error.empty()) {
      ++t.failed;
      err += f.input + ": " + f.error + "\n";
      continue;
    }
    for (const PhraseResult& p : f.phrases) {
      if (p.error.empty()) {
        ++t.ok;
      } else {
        ++t.failed;
        err += f.input + ": phrase '" + p.phrase.id + "': " + p.error + "\n";
      }
    }
  }
  return t;
}

ordered_json file_json(const FileResult& f, bool debug) {
  ordered_json j;
  j["input"] = f.input;
  if (!f.error.empty()) {
    j["error"] = f.error;
    return j;
  }
  ordered_json phrases = ordered_json::array();
  for (const PhraseResult& p : f.phrases) {
    ordered_json pj;
    pj["phrase"] = p.phrase.id;
    if (!p.error.empty()) {
      pj["error"] = p.error;
      phrases.push_back(pj);
      continue;
    }
    ordered_json alts = ordered_json::array();
    for (std::size_t r = 0; r < p.alternatives.size(); ++r) {
      const Alternative& a = p.alternatives[r];
      ordered_json aj;
      aj["rank"] = r + 1;
      if (a.path_cost) {
        aj["path_cost"] = *a.path_cost;
        aj["path"] = a.path;
        aj["overflowed"] = a.overflowed;
      }
      aj["melody"] = ordered_json::parse(serialize_reduction(a.melody, p.phrase));
      alts.push_back(aj);
    }
    pj["reductions"] = alts;
    if (debug && !p.debug.is_null()) pj["debug"] = p.debug;
    phrases.push_back(pj);
  }
  j["phrases"] = phrases;
  return j;
}

std::string rolls_text(const FileResult& f, bool with_original) {
  std::ostringstream out;
  if (!f.error.empty()) return out.str();
  for (const PhraseResult& p : f.phrases) {
    if (!p.error.empty()) continue;
    const TimeSignature& ts = p.phrase.time_signature;
    if (with_original) {
      out << "== " << p.phrase.id << " original ==\n"
          << render_ascii_roll(as_reduced_notes(p.phrase.notes), p.phrase.chords, ts);
    }
    for (std::size_t r = 0; r < p.alternatives.size(); ++r) {
      const Alternative& a = p.alternatives[r];
      out << "== " << p.phrase.id << " reduction " << (r + 1);
      if (a.path_cost) {
        std::ostringstream cost;
        cost.precision(6);
        cost << *a.path_cost;
        out << " (path cost " << cost.str() << ")";
      }
      out << " ==\n" << render_ascii_roll(a.melody.notes, p.phrase.chords, ts);
    }
  }
  return out.str();
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  const std::string ext = p.extension().string();
  p.replace_extension();
  return fs::path(p.string() + suffix + ext);
}

// Destination for one input: the --out file for a single input, or a file
// inside the --out directory named after the input.
fs::path target_for(const RunConfig& cfg, std::size_t file_count, const std::string& input, const std::string& command,
                    const std::string& ext) {
  if (file_count == 1) return fs::path(cfg.out);
  return fs::path(cfg.out) / (fs::path(input).stem().string() + "." + command + ext);
}

CommandResult emit(const RunConfig& cfg, const std::vector<FileResult>& results, const std::string& command,
                   OutputFormat format, bool roll_original) {
  CommandResult res;
  Tally t = tally_and_report(results, res.err);
  res.exit_code = t.exit_code();

  if (format == OutputFormat::kMidi && cfg.out.empty()) {
    res.err += "MIDI output needs --out\n";
    res.exit_code = 2;
    return res;
  }

  auto doc_for = [&](const std::vector<const FileResult*>& files) {
    ordered_json doc;
    doc["command"] = command;
    ordered_json list = ordered_json::array();
    for (const FileResult* f : files) list.push_back(file_json(*f, cfg.debug_dumps));
    doc["files"] = list;
    return doc.dump(2) + "\n";
  };

  try {
    if (cfg.out.empty()) {
      if (format == OutputFormat::kJson) {
        std::vector<const FileResult*> all;
        for (const FileResult& f : results) all.push_back(&f);
        res.out = doc_for(all);
      } else {
        for (const FileResult& f : results) {
          res.out += rolls_text(f, roll_original);
          if (cfg.debug_dumps) res.err += doc_for({&f});
        }
      }
      return res;
    }

    for (const FileResult& f : results) {
      if (!f.error.empty()) continue;
      if (format == OutputFormat::kJson) {
        write_file(target_for(cfg, results.size(), f.input, command, ".json"), doc_for({&f}));
        continue;
      }
      const std::string ext = format == OutputFormat::kMidi ? ".mid" : ".txt";
      const fs::path target = target_for(cfg, results.size(), f.input, command, ext);
      if (cfg.debug_dumps) write_file(fs::path(target.string() + ".debug.json"), doc_for({&f}));
      if (format != OutputFormat::kMidi) {
        write_file(target, rolls_text(f, roll_original));
        continue;
      }
      std::size_t ranks = 0;
      for (const PhraseResult& p : f.phrases) ranks = std::max(ranks, p.alternatives.size());
      for (std::size_t r = 0; r < ranks; ++r) {
        std::vector<Phrase> originals;
        std::vector<ReducedMelody> melodies;
        for (const PhraseResult& p : f.phrases) {
          if (!p.error.empty()) continue;
          originals.push_back(p.phrase);
          melodies.push_back(p.alternatives[std::min(r, p.alternatives.size() - 1)].melody);
        }
        const std::vector<std::uint8_t> bytes = write_midi(reduction_to_midi(originals, melodies));
        const fs::path path = ranks > 1 ? with_suffix(target, ".rank" + std::to_string(r + 1)) : target;
        write_file(path, std::string(bytes.begin(), bytes.end()));
      }
    }
  } catch (const std::exception& e) {
    res.err += std::string("output error: ") + e.what() + "\n";
    res.exit_code = 2;
  }
  return res;
}

}  // namespace

std::optional<OutputFormat> output_format_from_string(const std::string& name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "midi") return OutputFormat::kMidi;
  if (name == "ascii-roll") return OutputFormat::kAsciiRoll;
  if (name == "table") return OutputFormat::kTable;
  return std::nullopt;
}

RunConfig apply_config(RunConfig base, const nlohmann::json& config) {
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
  nlohmann::json cost = nlohmann::json::object();
  for (auto it = config.begin(); it != config.end(); ++it) {
    const std::string& key = it.key();
    const nlohmann::json& v = it.value();
    if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw std::invalid_argument("seed must be a non-negative integer");
      }
      base.seed = v.get<std::uint64_t>();
    } else if (key == "k") {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) throw std::invalid_argument("k must be >= 1");
      base.k = v.get<std::size_t>();
    } else if (key == "workers") {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) throw std::invalid_argument("workers must be >= 1");
      base.workers = v.get<std::size_t>();
    } else if (key == "protect_endpoints") {
      if (!v.is_boolean()) throw std::invalid_argument("protect_endpoints must be a boolean");
      base.protect_endpoints = v.get<bool>();
    } else if (key == "anticipation_window") {
      if (v.is_string()) {
        base.anticipation_window = parse_rational(v.get<std::string>());
      } else if (v.is_number()) {
        base.anticipation_window = parse_rational(v.dump());
      } else {
        throw std::invalid_argument("anticipation_window must be a number or \"num/den\" string");
      }
      if (base.anticipation_window < 0) throw std::invalid_argument("anticipation_window must be >= 0");
    } else if (key == "chord_rounding") {
      const std::string s = v.is_string() ? v.get<std::string>() : "";
      if (s == "strict") {
        base.rounding = ChordRounding::kStrict;
      } else if (s == "nearest") {
        base.rounding = ChordRounding::kNearest;
      } else {
        throw std::invalid_argument("chord_rounding must be \"strict\" or \"nearest\"");
      }
    } else {
      cost[key] = v;
    }
  }
  base.cost = cost_config_from_json(cost, base.cost);
  return base;
}

CommandResult cmd_reduce(const RunConfig& cfg) {
  const auto files = expand_inputs(cfg.inputs);
  return emit(cfg, process_all(files, cfg, Method::kProposed), "reduce", cfg.format.value_or(OutputFormat::kJson),
              false);
}

CommandResult cmd_baseline(const RunConfig& cfg) {
  const auto files = expand_inputs(cfg.inputs);
  return emit(cfg, process_all(files, cfg, Method::kBaseline), "baseline", cfg.format.value_or(OutputFormat::kJson),
              false);
}

CommandResult cmd_render(const RunConfig& cfg) {
  const auto files = expand_inputs(cfg.inputs);
  RunConfig render = cfg;
  render.format = OutputFormat::kAsciiRoll;
  return emit(render, process_all(files, render, Method::kProposed), "render", OutputFormat::kAsciiRoll, true);
}

CommandResult cmd_compare(const RunConfig& cfg) {
  const auto files = expand_inputs(cfg.inputs);
  const auto proposed = process_all(files, cfg, Method::kProposed);
  const auto baseline = process_all(files, cfg, Method::kBaseline);

  CommandResult res;
  Tally t = tally_and_report(proposed, res.err);
  res.exit_code = t.exit_code();

  std::vector<MetricRow> rows;
  std::vector<std::string> errors;
  for (std::size_t f = 0; f < proposed.size(); ++f) {
    const FileResult& pf = proposed[f];
    const std::string name = fs::path(pf.input).filename().string();
    if (!pf.error.empty()) {
      errors.push_back(name + ": " + pf.error);
      continue;
    }
    for (std::size_t p = 0; p < pf.phrases.size(); ++p) {
      const PhraseResult& pr = pf.phrases[p];
      const PhraseResult& br = baseline[f].phrases.at(p);
      const std::string label = name + ":" + pr.phrase.id;
      if (!pr.error.empty()) {
        errors.push_back(label + ": " + pr.error);
        continue;
      }
      try {
        rows.push_back({label, "proposed", compute_metrics(pr.phrase, pr.alternatives.front().melody)});
        rows.push_back({label, "DS-OBS", compute_metrics(br.phrase, br.alternatives.front().melody)});
      } catch (const std::exception& e) {
        errors.push_back(label + ": " + e.what());
      }
    }
  }

  const OutputFormat format = cfg.format.value_or(OutputFormat::kTable);
  std::string text;
  if (format == OutputFormat::kJson) {
    ordered_json doc = metric_rows_to_json(rows);
    doc["errors"] = errors;
    text = doc.dump(2) + "\n";
  } else {
    text = format_metric_table(rows);
    for (const std::string& e : errors) text += "error  " + e + "\n";
  }
  if (cfg.out.empty()) {
    res.out = text;
  } else {
    try {
      write_file(cfg.out, text);
    } catch (const std::exception& e) {
      res.err += std::string("output error: ") + e.what() + "\n";
      res.exit_code = 2;
    }
  }
  return res;
}

}  // namespace melred
