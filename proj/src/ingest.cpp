#include "melred/ingest.h"

#include <algorithm>
#include <stdexcept>

#include "melred/chords.h"
#include "melred/midi.h"

namespace melred {

std::string_view to_string(IngestErrorKind kind) {
  switch (kind) {
    case IngestErrorKind::kIo: return "io";
    case IngestErrorKind::kSchema: return "schema";
    case IngestErrorKind::kChordSymbol: return "chord-symbol";
    case IngestErrorKind::kPolyphony: return "polyphony";
    case IngestErrorKind::kCoverage: return "coverage";
    case IngestErrorKind::kMidi: return "midi";
    case IngestErrorKind::kSidecar: return "sidecar";
    case IngestErrorKind::kValidation: return "validation";
  }
  return "unknown";
}

Rational snap(const Rational& t, const QuantizationConfig& q) {
  if (q.grid != 1 && q.grid != 2 && q.grid != 4) {
    throw std::invalid_argument("quantization grid must be 1, 2 or 4, got " + std::to_string(q.grid));
  }
  const Rational scaled = t * q.grid;
  std::int64_t base = floor_int(scaled);
  if (scaled - base > Rational(1, 2)) ++base;
  return Rational(base, q.grid);
}

Note snap_note(const Note& note, const QuantizationConfig& q) {
  Note out = note;
  out.onset = snap(note.onset, q);
  Rational end = snap(note.end(), q);
  if (end <= out.onset) end = out.onset + Rational(1, q.grid);
  out.duration = end - out.onset;
  return out;
}

ChordMembership detect_anticipations(const Phrase& phrase, const AnticipationConfig& cfg) {
  ChordMembership m;
  m.chord_index.reserve(phrase.notes.size());
  m.anticipation.reserve(phrase.notes.size());
  for (std::size_t i = 0; i < phrase.notes.size(); ++i) {
    const Note& note = phrase.notes[i];
    auto current = chord_at(phrase.chords, note.onset);
    if (!current) {
      throw std::invalid_argument("note " + std::to_string(i) + " onset is not covered by a chord");
    }
    std::size_t assigned = *current;
    bool flagged = false;
    if (*current + 1 < phrase.chords.size()) {
      const ChordEvent& here = phrase.chords[*current];
      const ChordEvent& next = phrase.chords[*current + 1];
      const int pc = pitch_class(note.pitch);
      const Rational lead = next.onset - note.onset;
      flagged = lead > 0 && lead <= cfg.window && !here.contains(pc) && next.contains(pc) &&
                note.end() >= next.onset;
      if (flagged) assigned = *current + 1;
    }
    m.chord_index.push_back(assigned);
    m.anticipation.push_back(flagged);
  }
  return m;
}

std::size_t chord_of(std::size_t note_index, const ChordMembership& membership) {
  if (note_index >= membership.chord_index.size()) {
    throw std::out_of_range("note index " + std::to_string(note_index) + " outside membership of size " +
                            std::to_string(membership.chord_index.size()));
  }
  return membership.chord_index[note_index];
}

std::vector<Phrase> assemble_phrases(const std::string& id, std::vector<SourceNote> notes,
                                     std::vector<ChordEvent> chords, const TimeSignature& ts,
                                     const Rational& anacrusis, const std::vector<PhraseSpan>& spans) {
  std::stable_sort(chords.begin(), chords.end(),
                   [](const ChordEvent& a, const ChordEvent& b) { return a.onset < b.onset; });
  for (std::size_t k = 0; k < chords.size(); ++k) {
    if (chords[k].duration <= 0) {
      throw IngestError(IngestErrorKind::kSchema, "chord at beat " + to_string(chords[k].onset) +
                                                      " has non-positive duration");
    }
    if (k > 0 && chords[k].onset < chords[k - 1].end()) {
      throw IngestError(IngestErrorKind::kSchema, "chords at beats " + to_string(chords[k - 1].onset) + " and " +
                                                      to_string(chords[k].onset) + " overlap");
    }
  }

  std::stable_sort(notes.begin(), notes.end(), [](const SourceNote& a, const SourceNote& b) {
    if (a.note.onset != b.note.onset) return a.note.onset < b.note.onset;
    return a.note.pitch < b.note.pitch;
  });
  for (std::size_t i = 1; i < notes.size(); ++i) {
    if (notes[i].note.onset < notes[i - 1].note.end()) {
      std::size_t a = std::min(notes[i - 1].source_index, notes[i].source_index);
      std::size_t b = std::max(notes[i - 1].source_index, notes[i].source_index);
      throw IngestError(IngestErrorKind::kPolyphony,
                        "notes " + std::to_string(a) + " and " + std::to_string(b) + " overlap in time");
    }
  }
  for (const SourceNote& n : notes) {
    if (!chord_at(chords, n.note.onset)) {
      throw IngestError(IngestErrorKind::kCoverage, "note " + std::to_string(n.source_index) + " at beat " +
                                                        to_string(n.note.onset) + " is not under any chord");
    }
  }

  std::vector<PhraseSpan> bounds = spans;
  const bool split = !spans.empty();
  if (!split) {
    Rational lo = chords.empty() ? Rational(0) : chords.front().onset;
    Rational hi = chords.empty() ? Rational(0) : chords.back().end();
    bounds.emplace_back(lo, hi);
  }
  for (std::size_t s = 0; s < bounds.size(); ++s) {
    if (bounds[s].first >= bounds[s].second || (s > 0 && bounds[s].first < bounds[s - 1].second)) {
      throw IngestError(IngestErrorKind::kSchema, "phrase span " + std::to_string(s) +
                                                      " is empty or overlaps the previous span");
    }
  }

  std::vector<Phrase> phrases(bounds.size());
  for (std::size_t s = 0; s < bounds.size(); ++s) {
    Phrase& p = phrases[s];
    p.id = split ? id + "#" + std::to_string(s) : id;
    p.time_signature = ts;
    p.anacrusis = anacrusis;
    const auto [lo, hi] = bounds[s];
    for (const ChordEvent& c : chords) {
      if (c.end() <= lo || c.onset >= hi) continue;
      ChordEvent clipped = c;
      clipped.onset = std::max(c.onset, lo);
      clipped.duration = std::min(c.end(), hi) - clipped.onset;
      p.chords.push_back(clipped);
    }
  }
  for (const SourceNote& n : notes) {
    auto it = std::find_if(bounds.begin(), bounds.end(), [&](const PhraseSpan& b) {
      return b.first <= n.note.onset && n.note.onset < b.second;
    });
    if (it == bounds.end()) {
      throw IngestError(IngestErrorKind::kSchema,
                        "note " + std::to_string(n.source_index) + " lies outside every phrase span");
    }
    phrases[static_cast<std::size_t>(it - bounds.begin())].notes.push_back(n.note);
  }

  for (const Phrase& p : phrases) {
    auto violations = validate_phrase(p);
    if (!violations.empty()) {
      throw IngestError(IngestErrorKind::kValidation, "phrase '" + p.id + "': " + violations.front().message);
    }
  }
  return phrases;
}

std::vector<Phrase> import_midi(std::span<const std::uint8_t> midi_bytes, std::string_view chord_csv,
                                const QuantizationConfig& quant, const MidiImportOptions& options) {
  const MidiFile file = read_midi(midi_bytes);
  std::size_t track_index = 0;
  if (options.track) {
    track_index = *options.track;
    if (track_index >= file.tracks.size()) {
      throw IngestError(IngestErrorKind::kMidi, "track " + std::to_string(track_index) + " does not exist (file has " +
                                                    std::to_string(file.tracks.size()) + " tracks)");
    }
  } else {
    auto it = std::find_if(file.tracks.begin(), file.tracks.end(),
                           [](const MidiTrack& t) { return !t.notes.empty(); });
    if (it == file.tracks.end()) throw IngestError(IngestErrorKind::kMidi, "no note events in any track");
    track_index = static_cast<std::size_t>(it - file.tracks.begin());
  }
  const MidiTrack& track = file.tracks[track_index];
  if (track.notes.empty()) {
    throw IngestError(IngestErrorKind::kMidi, "track " + std::to_string(track_index) + " has no note events");
  }

  std::vector<SourceNote> notes;
  notes.reserve(track.notes.size());
  for (std::size_t i = 0; i < track.notes.size(); ++i) {
    const MidiNote& mn = track.notes[i];
    Note raw{Rational(mn.start_tick, file.ticks_per_quarter), mn.pitch,
             Rational(mn.end_tick - mn.start_tick, file.ticks_per_quarter)};
    notes.push_back({snap_note(raw, quant), i});
  }
  return assemble_phrases(options.id, std::move(notes), parse_chord_csv(chord_csv),
                          file.time_signature.value_or(TimeSignature{}), options.anacrusis, options.phrases);
}

}  // namespace melred
