#include "melred/postprocess.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace melred {

std::vector<NoteGroup> merge_prolongations(const Phrase& phrase, const ReductionPath& path,
                                           const ReductionGraph& graph, const ChordMembership& membership) {
  std::vector<NoteGroup> groups;
  for (std::size_t s = 0; s < path.nodes.size(); ++s) {
    const std::size_t node = path.nodes[s];
    const std::size_t chord = chord_of(node, membership);
    if (s > 0) {
      const std::size_t prev = path.nodes[s - 1];
      if (graph.edge(prev, node).category == EdgeCategory::kProlongation && chord_of(prev, membership) == chord) {
        groups.back().sources.push_back(node);
        continue;
      }
    }
    const Note& note = phrase.notes.at(node);
    groups.push_back({{node}, note.pitch, note.onset, chord});
  }
  return groups;
}

std::vector<ChordBin> allocate_bins(const std::vector<NoteGroup>& groups, const std::vector<ChordEvent>& chords,
                                    ChordRounding rounding) {
  std::vector<ChordBin> bins(chords.size());
  for (std::size_t k = 0; k < chords.size(); ++k) {
    const ChordEvent& c = chords[k];
    ChordBin& bin = bins[k];
    bin.chord_index = k;
    if (rounding == ChordRounding::kStrict) {
      if (!is_integer(c.duration) || c.duration <= 0) {
        throw std::invalid_argument("chord " + std::to_string(k) + " lasts " + to_string(c.duration) +
                                    " beats; chord bins need whole beats");
      }
      bin.onset = c.onset;
      bin.length = c.duration.numerator();
    } else {
      const QuantizationConfig beats{1};
      bin.onset = snap(c.onset, beats);
      bin.length = floor_int(snap(c.end(), beats) - bin.onset);
      if (bin.length <= 0) {
        throw std::invalid_argument("chord " + std::to_string(k) + " rounds to zero beats");
      }
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    bins.at(groups[g].chord_index).members.push_back(g);
  }
  return bins;
}

std::vector<std::int64_t> front_loaded_template(std::int64_t length, std::int64_t count) {
  if (count <= 0 || count > length) {
    throw std::invalid_argument("rhythm template needs 0 < count <= length, got count " + std::to_string(count) +
                                " for length " + std::to_string(length));
  }
  std::vector<std::int64_t> durations(static_cast<std::size_t>(count), length / count);
  for (std::int64_t r = 0; r < length % count; ++r) ++durations[static_cast<std::size_t>(r)];
  return durations;
}

namespace {

// Unbiased draw from [0, n).
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace

std::vector<std::size_t> choose_survivors(const ChordBin& bin, const OmissionPolicy& policy) {
  const std::size_t count = bin.members.size();
  const std::size_t length = static_cast<std::size_t>(std::max<std::int64_t>(bin.length, 0));
  std::vector<std::size_t> all(count);
  std::iota(all.begin(), all.end(), 0);
  if (count <= length) return all;

  std::vector<std::size_t> keep;
  std::vector<std::size_t> pool;
  std::size_t picks = length;
  if (policy.protect_endpoints) {
    keep.push_back(0);
    if (length >= 2) keep.push_back(count - 1);
    picks = length - keep.size();
    pool.assign(all.begin() + 1, all.end() - 1);
  } else {
    pool = all;
  }

  std::seed_seq seq{static_cast<std::uint32_t>(policy.rng_seed), static_cast<std::uint32_t>(policy.rng_seed >> 32),
                    static_cast<std::uint32_t>(bin.chord_index)};
  std::mt19937_64 rng(seq);
  for (std::size_t p = 0; p < picks; ++p) {
    std::size_t r = p + static_cast<std::size_t>(bounded(rng, pool.size() - p));
    std::swap(pool[p], pool[r]);
    keep.push_back(pool[p]);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

std::vector<ReducedNote> apply_rhythm_template(const ChordBin& bin, const std::vector<NoteGroup>& groups,
                                               const RhythmTemplate& tmpl, const OmissionPolicy& policy) {
  if (bin.members.empty()) return {};
  const std::vector<std::size_t> survivors = choose_survivors(bin, policy);
  const auto durations = tmpl(bin.length, static_cast<std::int64_t>(survivors.size()));
  if (durations.size() != survivors.size() ||
      std::accumulate(durations.begin(), durations.end(), std::int64_t{0}) != bin.length ||
      std::any_of(durations.begin(), durations.end(), [](std::int64_t d) { return d < 1; })) {
    throw std::logic_error("rhythm template must give one duration >= 1 per note summing to the bin length");
  }

  std::vector<ReducedNote> out;
  Rational onset = bin.onset;
  for (std::size_t s = 0; s < survivors.size(); ++s) {
    const NoteGroup& g = groups.at(bin.members[survivors[s]]);
    ReducedNote note;
    note.onset = onset;
    note.pitch = g.pitch;
    note.duration = Rational(durations[s]);
    note.source_indices = g.sources;
    onset += note.duration;
    out.push_back(std::move(note));
  }
  return out;
}

ReducedMelody mark_suspensions(const std::vector<ChordBin>& bins, const std::vector<std::vector<ReducedNote>>& realized,
                               const ReductionPath& path, const ReductionGraph& graph, const std::string& phrase_ref) {
  if (bins.size() != realized.size()) throw std::invalid_argument("one realization per bin is required");
  ReducedMelody melody;
  melody.phrase_ref = phrase_ref;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (realized[b].empty()) {
      if (!melody.notes.empty()) {
        ReducedNote& last = melody.notes.back();
        last.duration = bins[b].onset + bins[b].length - last.onset;
      }
      continue;
    }
    melody.notes.insert(melody.notes.end(), realized[b].begin(), realized[b].end());
  }

  auto holder = [&melody](std::size_t source) -> std::optional<std::size_t> {
    for (std::size_t r = 0; r < melody.notes.size(); ++r) {
      const auto& s = melody.notes[r].source_indices;
      if (std::find(s.begin(), s.end(), source) != s.end()) return r;
    }
    return std::nullopt;
  };
  for (std::size_t s = 1; s < path.nodes.size(); ++s) {
    if (graph.edge(path.nodes[s - 1], path.nodes[s]).category != EdgeCategory::kProlongation) continue;
    auto from = holder(path.nodes[s - 1]);
    auto to = holder(path.nodes[s]);
    if (!from || !to || *to != *from + 1) continue;
    ReducedNote& earlier = melody.notes[*from];
    if (earlier.end() == melody.notes[*to].onset && earlier.pitch == melody.notes[*to].pitch) {
      earlier.tie_to_next = true;
    }
  }

  for (std::size_t r = 1; r < melody.notes.size(); ++r) {
    if (melody.notes[r].onset < melody.notes[r - 1].end()) {
      throw std::logic_error("reduced notes overlap at beat " + to_string(melody.notes[r].onset));
    }
  }
  return melody;
}

Realization realize_path(const Phrase& phrase, const ChordMembership& membership, const ReductionGraph& graph,
                         const ReductionPath& path, const OmissionPolicy& policy, const ReduceOptions& options) {
  Realization out;
  out.path = path;
  out.groups = merge_prolongations(phrase, path, graph, membership);
  out.bins = allocate_bins(out.groups, phrase.chords, options.rounding);
  std::vector<std::vector<ReducedNote>> realized;
  realized.reserve(out.bins.size());
  for (const ChordBin& bin : out.bins) {
    if (static_cast<std::int64_t>(bin.members.size()) > bin.length) out.overflowed = true;
    realized.push_back(apply_rhythm_template(bin, out.groups, options.rhythm, policy));
  }
  out.melody = mark_suspensions(out.bins, realized, path, graph, phrase.id);
  return out;
}

Reduction reduce_phrase_detailed(const Phrase& phrase, const CostConfig& cfg, const OmissionPolicy& policy,
                                 const ReduceOptions& options) {
  if (auto violations = validate_phrase(phrase); !violations.empty()) {
    throw std::invalid_argument("phrase '" + phrase.id + "' is invalid: " + violations.front().message);
  }
  if (auto problems = cfg.validate(); !problems.empty()) throw std::invalid_argument(problems.front());

  Reduction r;
  r.membership = detect_anticipations(phrase, options.anticipation);
  std::optional<PitchRange> range;
  if (cfg.pitch_range_scope == PitchRangeScope::kPiece) range = options.pitch_range;
  r.graph = build_graph(phrase, r.membership, cfg, range);
  std::vector<ReductionPath> paths =
      options.k <= 1 ? std::vector<ReductionPath>{shortest_path(r.graph)} : k_shortest_paths(r.graph, options.k);
  for (const ReductionPath& path : paths) {
    r.realizations.push_back(realize_path(phrase, r.membership, r.graph, path, policy, options));
  }
  return r;
}

ReducedMelody reduce_phrase(const Phrase& phrase, const CostConfig& cfg, const OmissionPolicy& policy,
                            const ReduceOptions& options) {
  ReduceOptions single = options;
  single.k = 1;
  return reduce_phrase_detailed(phrase, cfg, policy, single).realizations.front().melody;
}

nlohmann::ordered_json bins_to_json(const std::vector<ChordBin>& bins, const std::vector<NoteGroup>& groups) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const ChordBin& bin : bins) {
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (std::size_t g : bin.members) {
      members.push_back({{"sources", groups.at(g).sources}, {"pitch", groups.at(g).pitch}});
    }
    out.push_back({{"chord", bin.chord_index},
                   {"onset", to_string(bin.onset)},
                   {"length", bin.length},
                   {"members", members}});
  }
  return out;
}

}  // namespace melred
