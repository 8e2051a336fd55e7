// Turning a least-cost path into a playable reduced melody on a quarter-note grid.
//
// Path notes are grouped (same-chord prolongations merge), dropped into one
// bin per chord, and each bin is tiled by a rhythm template so its notes span
// the whole chord. Overfull bins lose notes at random (seeded). Prolongations
// that cross a chord change become ties.

#ifndef MELRED_POSTPROCESS_H_
#define MELRED_POSTPROCESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"
#include "melred/ingest.h"
#include "melred/model.h"
#include "melred/path_solver.h"
#include "melred/reduction_graph.h"

namespace melred {

/// Consecutive path notes merged by prolongation edges.
struct NoteGroup {
  // Original note indices, increasing.
  std::vector<std::size_t> sources;
  int pitch = 60;
  Rational onset;
  std::size_t chord_index = 0;

  bool operator==(const NoteGroup&) const = default;
};

/// Collapses maximal runs of path steps that are PE edges between notes of
/// the same chord. PE steps across a chord change stay separate (they become ties).
std::vector<NoteGroup> merge_prolongations(const Phrase& phrase, const ReductionPath& path,
                                           const ReductionGraph& graph, const ChordMembership& membership);

enum class ChordRounding {
  kStrict,   // every chord must already span whole beats
  kNearest,  // round chord boundaries to the nearest beat; a chord collapsing to zero is an error
};

struct ChordBin {
  std::size_t chord_index = 0;
  Rational onset;
  // Whole quarter beats.
  std::int64_t length = 0;
  // Indices into the group list, in onset order.
  std::vector<std::size_t> members;

  bool operator==(const ChordBin&) const = default;
};

/// One bin per chord; each group lands in the bin of its chord (anticipations
/// already point at the next chord). Throws std::invalid_argument when a chord
/// does not span whole beats under `rounding`.
std::vector<ChordBin> allocate_bins(const std::vector<NoteGroup>& groups, const std::vector<ChordEvent>& chords,
                                    ChordRounding rounding = ChordRounding::kStrict);

/// Durations in whole beats for `count` notes filling `length` beats (count <= length).
using RhythmTemplate = std::function<std::vector<std::int64_t>(std::int64_t length, std::int64_t count)>;

/// length / count beats each; the remainder goes one beat at a time to the earliest notes.
std::vector<std::int64_t> front_loaded_template(std::int64_t length, std::int64_t count);

struct OmissionPolicy {
  std::uint64_t rng_seed = 0;
  // Keep the first and last note of an overfull bin.
  bool protect_endpoints = true;
};

/// Group indices (positions within `bin.members`) that survive when a bin holds
/// more notes than beats. Deterministic in (seed, chord index).
std::vector<std::size_t> choose_survivors(const ChordBin& bin, const OmissionPolicy& policy);

/// Realizes one bin. Empty bins give no notes.
std::vector<ReducedNote> apply_rhythm_template(const ChordBin& bin, const std::vector<NoteGroup>& groups,
                                               const RhythmTemplate& tmpl, const OmissionPolicy& policy);

/// Joins realized bins into one melody. A prolongation step of the path whose
/// endpoints sit in different bins and both survive sets tie_to_next on the
/// earlier note. An empty bin extends the previous note; leading empty bins
/// stay silent.
ReducedMelody mark_suspensions(const std::vector<ChordBin>& bins, const std::vector<std::vector<ReducedNote>>& realized,
                               const ReductionPath& path, const ReductionGraph& graph, const std::string& phrase_ref);

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct ReduceOptions {
  AnticipationConfig anticipation;
  ChordRounding rounding = ChordRounding::kStrict;
  RhythmTemplate rhythm = front_loaded_template;
  // Number of alternative paths to realize.
  std::size_t k = 1;
  // Piece-level pitch extremes when CostConfig asks for them.
  std::optional<PitchRange> pitch_range;
};

struct Realization {
  ReductionPath path;
  std::vector<NoteGroup> groups;
  std::vector<ChordBin> bins;
  ReducedMelody melody;
  // Some bin held more notes than beats, so the seed mattered.
  bool overflowed = false;
};

struct Reduction {
  ChordMembership membership;
  ReductionGraph graph;
  // Ranked by path cost; realizations.front() is the least-cost reduction.
  std::vector<Realization> realizations;
};

Realization realize_path(const Phrase& phrase, const ChordMembership& membership, const ReductionGraph& graph,
                         const ReductionPath& path, const OmissionPolicy& policy, const ReduceOptions& options = {});

/// Full pipeline with every intermediate kept.
Reduction reduce_phrase_detailed(const Phrase& phrase, const CostConfig& cfg, const OmissionPolicy& policy,
                                 const ReduceOptions& options = {});

ReducedMelody reduce_phrase(const Phrase& phrase, const CostConfig& cfg, const OmissionPolicy& policy = {},
                            const ReduceOptions& options = {});

nlohmann::ordered_json bins_to_json(const std::vector<ChordBin>& bins, const std::vector<NoteGroup>& groups);

}  // namespace melred

#endif  // MELRED_POSTPROCESS_H_
