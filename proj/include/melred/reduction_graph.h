// Weighted causal graph over the notes of a phrase.
//
// Every ordered pair i < j is an edge. Each edge gets one of six categories
// from the pitch relation of its endpoints and a cost
//
//   cost(i -> j) = importance(j) * ((j - i)^eta + tonal(category))
//
// where importance is the product of pitch, onset, duration and harmony
// factors of the destination note. Cheaper edges are more structural.

#ifndef MELRED_REDUCTION_GRAPH_H_
#define MELRED_REDUCTION_GRAPH_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "melred/model.h"

namespace melred {

enum class EdgeCategory {
  kProlongation,           // PE: same pitch
  kLinear,                 // LE: a second
  kArpeggiation,           // AE: larger interval inside one chord
  kImaginaryProlongation,  // IPE: same pitch class
  kImaginaryLinear,        // ILE: compound second
  kUnclassified,           // UE
};

inline constexpr std::array<EdgeCategory, 6> kAllCategories = {
    EdgeCategory::kProlongation,          EdgeCategory::kLinear,          EdgeCategory::kArpeggiation,
    EdgeCategory::kImaginaryProlongation, EdgeCategory::kImaginaryLinear, EdgeCategory::kUnclassified};

/// Short tag: "PE", "LE", "AE", "IPE", "ILE", "UE".
std::string_view to_string(EdgeCategory category);
std::optional<EdgeCategory> category_from_string(std::string_view tag);

enum class PitchRangeScope { kPhrase, kPiece };

struct CostConfig {
  // Indexed by EdgeCategory.
  std::array<double, 6> tonal_costs = {0.1, 0.3, 1.5, 1.0, 1.3, 3.0};
  double eta = 1.6;
  int D_measures = 2;
  double pitch_weight_span = 0.1;
  // Downbeat, beat, eighth, sixteenth-or-finer.
  std::array<double, 4> onset_factors = {0.85, 0.95, 1.05, 1.15};
  // >= half, >= quarter, >= eighth, shorter.
  std::array<double, 4> duration_factors = {0.85, 0.95, 1.05, 1.15};
  // Chord tone, non-chord tone.
  std::array<double, 2> harmony_factors = {0.85, 1.15};
  PitchRangeScope pitch_range_scope = PitchRangeScope::kPhrase;

  double tonal_cost(EdgeCategory c) const { return tonal_costs[static_cast<std::size_t>(c)]; }

  /// Human-readable problems; empty when usable.
  std::vector<std::string> validate() const;

  bool operator==(const CostConfig&) const = default;
};

/// Flat JSON object, keys as the field names ("tonal_PE" ... "tonal_UE" for the table).
nlohmann::ordered_json cost_config_to_json(const CostConfig& cfg);

/// Overlays the keys present in `j` onto `base`. Unknown keys and bad values throw
/// std::invalid_argument.
CostConfig cost_config_from_json(const nlohmann::json& j, CostConfig base = {});

// ---------------------------------------------------------------------------
// Edge classification
// ---------------------------------------------------------------------------

/// The temporal threshold D in quarter beats.
Rational temporal_threshold(const TimeSignature& ts, const CostConfig& cfg);

/// Classifies from -> to. Precedence PE, LE, IPE, ILE, AE, UE; the first four
/// require Onset(to) - Onset(from) < threshold, AE requires same_chord.
EdgeCategory classify_edge(const Note& from, const Note& to, bool same_chord, const Rational& threshold);

EdgeCategory classify_edge(const Phrase& phrase, const ChordMembership& membership, std::size_t i, std::size_t j,
                           const CostConfig& cfg);

// ---------------------------------------------------------------------------
// Cost terms
// ---------------------------------------------------------------------------

double tonal_cost(EdgeCategory category, const CostConfig& cfg);

/// (j - i)^eta.
double temporal_cost(std::size_t i, std::size_t j, const CostConfig& cfg);

struct PitchRange {
  int min = 0;
  int max = 0;
};

PitchRange pitch_range(const Phrase& phrase);

/// Extreme registers are cheaper: span * (0.5 - |pitch - mid| / (max - mid)) + 1,
/// exactly 1 when the range is a single pitch.
double pitch_importance(const Note& note, int p_max, int p_min, const CostConfig& cfg);

/// Metrical position: measure downbeat, other integer beat, eighth offbeat, anything else.
double onset_importance(const Note& note, const TimeSignature& ts, const Rational& anacrusis, const CostConfig& cfg);

double duration_importance(const Note& note, const CostConfig& cfg);

/// Chord tone of `chord` or not. Pass the membership chord so anticipations
/// are judged against the chord they resolve into.
double harmony_importance(const Note& note, const ChordEvent& chord, const CostConfig& cfg);

struct NoteImportance {
  double pitch = 1.0;
  double onset = 1.0;
  double duration = 1.0;
  double harmony = 1.0;

  double total() const { return pitch * onset * duration * harmony; }
};

struct ImportanceContext {
  PitchRange range;
  TimeSignature time_signature;
  Rational anacrusis;
  const ChordEvent* chord = nullptr;
};

NoteImportance note_importance(const Note& note, const ImportanceContext& ctx, const CostConfig& cfg);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct Edge {
  EdgeCategory category = EdgeCategory::kUnclassified;
  double cost = 0.0;
};

class ReductionGraph {
 public:
  ReductionGraph() = default;
  ReductionGraph(std::vector<NoteImportance> importance, std::vector<Edge> edges);

  std::size_t node_count() const { return importance_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Edge i -> j, i < j < node_count(). Throws std::out_of_range otherwise.
  const Edge& edge(std::size_t i, std::size_t j) const;
  const NoteImportance& importance(std::size_t i) const { return importance_.at(i); }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::vector<NoteImportance> importance_;
  // Row-major upper triangle.
  std::vector<Edge> edges_;
};

/// Builds the complete causal graph. `range_override` replaces the phrase's own
/// pitch extremes (piece-level scope).
ReductionGraph build_graph(const Phrase& phrase, const ChordMembership& membership, const CostConfig& cfg,
                           std::optional<PitchRange> range_override = std::nullopt);

nlohmann::ordered_json graph_to_json(const ReductionGraph& graph);

}  // namespace melred

#endif  // MELRED_REDUCTION_GRAPH_H_
