#include "melred/reduction_graph.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "melred/ingest.h"

namespace melred {

std::string_view to_string(EdgeCategory category) {
  switch (category) {
    case EdgeCategory::kProlongation: return "PE";
    case EdgeCategory::kLinear: return "LE";
    case EdgeCategory::kArpeggiation: return "AE";
    case EdgeCategory::kImaginaryProlongation: return "IPE";
    case EdgeCategory::kImaginaryLinear: return "ILE";
    case EdgeCategory::kUnclassified: return "UE";
  }
  return "UE";
}

std::optional<EdgeCategory> category_from_string(std::string_view tag) {
  for (EdgeCategory c : kAllCategories) {
    if (to_string(c) == tag) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

std::vector<std::string> CostConfig::validate() const {
  std::vector<std::string> problems;
  for (EdgeCategory c : kAllCategories) {
    if (!(tonal_cost(c) >= 0.0) || !std::isfinite(tonal_cost(c))) {
      problems.push_back("tonal cost for " + std::string(to_string(c)) + " must be finite and >= 0");
    }
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) problems.push_back("eta must be finite and > 0");
  if (D_measures < 1) problems.push_back("D_measures must be >= 1");
  if (!(pitch_weight_span >= 0.0) || pitch_weight_span >= 2.0) {
    problems.push_back("pitch_weight_span must be in [0, 2) so the pitch factor stays positive");
  }
  auto positive = [&](const auto& factors, const char* name) {
    for (double f : factors) {
      if (!(f > 0.0) || !std::isfinite(f)) {
        problems.push_back(std::string(name) + " entries must be finite and > 0");
        return;
      }
    }
  };
  positive(onset_factors, "onset_factors");
  positive(duration_factors, "duration_factors");
  positive(harmony_factors, "harmony_factors");
  return problems;
}

nlohmann::ordered_json cost_config_to_json(const CostConfig& cfg) {
  nlohmann::ordered_json j;
  for (EdgeCategory c : kAllCategories) j["tonal_" + std::string(to_string(c))] = cfg.tonal_cost(c);
  j["eta"] = cfg.eta;
  j["D_measures"] = cfg.D_measures;
  j["pitch_weight_span"] = cfg.pitch_weight_span;
  j["onset_factors"] = cfg.onset_factors;
  j["duration_factors"] = cfg.duration_factors;
  j["harmony_factors"] = cfg.harmony_factors;
  j["pitch_range_scope"] = cfg.pitch_range_scope == PitchRangeScope::kPhrase ? "phrase" : "piece";
  return j;
}

namespace {

double number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
  return v.get<double>();
}

template <std::size_t N>
std::array<double, N> numbers(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array() || v.size() != N) {
    throw std::invalid_argument("config key '" + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(v[i], key);
  return out;
}

}  // namespace

CostConfig cost_config_from_json(const nlohmann::json& j, CostConfig base) {
  if (!j.is_object()) throw std::invalid_argument("cost config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const nlohmann::json& v = it.value();
    if (key.rfind("tonal_", 0) == 0) {
      auto cat = category_from_string(key.substr(6));
      if (!cat) throw std::invalid_argument("unknown config key '" + key + "'");
      base.tonal_costs[static_cast<std::size_t>(*cat)] = number(v, key);
    } else if (key == "eta") {
      base.eta = number(v, key);
    } else if (key == "D_measures") {
      if (!v.is_number_integer()) throw std::invalid_argument("config key 'D_measures' must be an integer");
      base.D_measures = v.get<int>();
    } else if (key == "pitch_weight_span") {
      base.pitch_weight_span = number(v, key);
    } else if (key == "onset_factors") {
      base.onset_factors = numbers<4>(v, key);
    } else if (key == "duration_factors") {
      base.duration_factors = numbers<4>(v, key);
    } else if (key == "harmony_factors") {
      base.harmony_factors = numbers<2>(v, key);
    } else if (key == "pitch_range_scope") {
      std::string s = v.is_string() ? v.get<std::string>() : "";
      if (s == "phrase") {
        base.pitch_range_scope = PitchRangeScope::kPhrase;
      } else if (s == "piece") {
        base.pitch_range_scope = PitchRangeScope::kPiece;
      } else {
        throw std::invalid_argument("pitch_range_scope must be \"phrase\" or \"piece\"");
      }
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (auto problems = base.validate(); !problems.empty()) throw std::invalid_argument(problems.front());
  return base;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

Rational temporal_threshold(const TimeSignature& ts, const CostConfig& cfg) {
  return Rational(cfg.D_measures) * ts.measure_length();
}

EdgeCategory classify_edge(const Note& from, const Note& to, bool same_chord, const Rational& threshold) {
  const bool near = to.onset - from.onset < threshold;
  const int interval = std::abs(from.pitch - to.pitch);
  // Plain difference of pitch classes, no circular folding.
  const int pc_diff = std::abs(pitch_class(from.pitch) - pitch_class(to.pitch));

  if (near && interval == 0) return EdgeCategory::kProlongation;
  if (near && (interval == 1 || interval == 2)) return EdgeCategory::kLinear;
  if (near && pc_diff == 0) return EdgeCategory::kImaginaryProlongation;
  if (near && (pc_diff == 1 || pc_diff == 2 || pc_diff == 10 || pc_diff == 11)) {
    return EdgeCategory::kImaginaryLinear;
  }
  if (pc_diff >= 3 && pc_diff <= 9 && same_chord) return EdgeCategory::kArpeggiation;
  return EdgeCategory::kUnclassified;
}

EdgeCategory classify_edge(const Phrase& phrase, const ChordMembership& membership, std::size_t i, std::size_t j,
                           const CostConfig& cfg) {
  return classify_edge(phrase.notes.at(i), phrase.notes.at(j), chord_of(i, membership) == chord_of(j, membership),
                       temporal_threshold(phrase.time_signature, cfg));
}

// ---------------------------------------------------------------------------
// Cost terms
// ---------------------------------------------------------------------------

double tonal_cost(EdgeCategory category, const CostConfig& cfg) { return cfg.tonal_cost(category); }

double temporal_cost(std::size_t i, std::size_t j, const CostConfig& cfg) {
  if (j <= i) throw std::invalid_argument("temporal_cost requires i < j");
  return std::pow(static_cast<double>(j - i), cfg.eta);
}

PitchRange pitch_range(const Phrase& phrase) {
  if (phrase.notes.empty()) return {};
  PitchRange r{phrase.notes.front().pitch, phrase.notes.front().pitch};
  for (const Note& n : phrase.notes) {
    r.min = std::min(r.min, n.pitch);
    r.max = std::max(r.max, n.pitch);
  }
  return r;
}

double pitch_importance(const Note& note, int p_max, int p_min, const CostConfig& cfg) {
  if (p_max == p_min) return 1.0;
  const double mid = (p_max + p_min) / 2.0;
  const double ratio = std::abs(note.pitch - mid) / (p_max - mid);
  return cfg.pitch_weight_span * (0.5 - ratio) + 1.0;
}

double onset_importance(const Note& note, const TimeSignature& ts, const Rational& anacrusis,
                        const CostConfig& cfg) {
  const Rational beat = measure_position(note.onset, ts, anacrusis).beat_in_measure;
  if (beat == 0) return cfg.onset_factors[0];
  if (is_integer(beat)) return cfg.onset_factors[1];
  if (is_integer(beat * 2)) return cfg.onset_factors[2];
  return cfg.onset_factors[3];
}

double duration_importance(const Note& note, const CostConfig& cfg) {
  if (note.duration >= 2) return cfg.duration_factors[0];
  if (note.duration >= 1) return cfg.duration_factors[1];
  if (note.duration >= Rational(1, 2)) return cfg.duration_factors[2];
  return cfg.duration_factors[3];
}

double harmony_importance(const Note& note, const ChordEvent& chord, const CostConfig& cfg) {
  return chord.contains(pitch_class(note.pitch)) ? cfg.harmony_factors[0] : cfg.harmony_factors[1];
}

NoteImportance note_importance(const Note& note, const ImportanceContext& ctx, const CostConfig& cfg) {
  if (ctx.chord == nullptr) throw std::invalid_argument("note_importance needs the note's chord");
  return {pitch_importance(note, ctx.range.max, ctx.range.min, cfg),
          onset_importance(note, ctx.time_signature, ctx.anacrusis, cfg), duration_importance(note, cfg),
          harmony_importance(note, *ctx.chord, cfg)};
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

ReductionGraph::ReductionGraph(std::vector<NoteImportance> importance, std::vector<Edge> edges)
    : importance_(std::move(importance)), edges_(std::move(edges)) {
  const std::size_t n = importance_.size();
  if (edges_.size() != (n == 0 ? 0 : n * (n - 1) / 2)) {
    throw std::invalid_argument("edge count does not match a complete causal graph");
  }
}

std::size_t ReductionGraph::index(std::size_t i, std::size_t j) const {
  const std::size_t n = node_count();
  if (i >= j || j >= n) {
    throw std::out_of_range("no edge " + std::to_string(i) + " -> " + std::to_string(j));
  }
  // Rows before i hold (n-1) + (n-2) + ... + (n-i) edges.
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

const Edge& ReductionGraph::edge(std::size_t i, std::size_t j) const { return edges_[index(i, j)]; }

ReductionGraph build_graph(const Phrase& phrase, const ChordMembership& membership, const CostConfig& cfg,
                           std::optional<PitchRange> range_override) {
  const std::size_t n = phrase.notes.size();
  if (membership.chord_index.size() != n) {
    throw std::invalid_argument("chord membership does not match the phrase");
  }
  ImportanceContext ctx;
  ctx.range = range_override.value_or(pitch_range(phrase));
  ctx.time_signature = phrase.time_signature;
  ctx.anacrusis = phrase.anacrusis;

  std::vector<NoteImportance> importance;
  importance.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ctx.chord = &phrase.chords.at(chord_of(i, membership));
    importance.push_back(note_importance(phrase.notes[i], ctx, cfg));
  }

  const Rational threshold = temporal_threshold(phrase.time_signature, cfg);
  std::vector<Edge> edges;
  edges.reserve(n == 0 ? 0 : n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Edge e;
      e.category = classify_edge(phrase.notes[i], phrase.notes[j],
                                 membership.chord_index[i] == membership.chord_index[j], threshold);
      e.cost = importance[j].total() * (temporal_cost(i, j, cfg) + cfg.tonal_cost(e.category));
      edges.push_back(e);
    }
  }
  return ReductionGraph(std::move(importance), std::move(edges));
}

nlohmann::ordered_json graph_to_json(const ReductionGraph& graph) {
  nlohmann::ordered_json j;
  j["node_count"] = graph.node_count();
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const NoteImportance& a = graph.importance(i);
    nodes.push_back({{"index", i},
                     {"pitch_factor", a.pitch},
                     {"onset_factor", a.onset},
                     {"duration_factor", a.duration},
                     {"harmony_factor", a.harmony},
                     {"importance", a.total()}});
  }
  j["nodes"] = nodes;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    for (std::size_t k = i + 1; k < graph.node_count(); ++k) {
      const Edge& e = graph.edge(i, k);
      edges.push_back({{"from", i}, {"to", k}, {"category", to_string(e.category)}, {"cost", e.cost}});
    }
  }
  j["edges"] = edges;
  return j;
}

}  // namespace melred
