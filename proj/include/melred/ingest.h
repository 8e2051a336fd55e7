// Turning external documents into validated phrases, plus the chord-membership
// pass that every downstream stage reads.

#ifndef MELRED_INGEST_H_
#define MELRED_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "melred/model.h"

namespace melred {

enum class IngestErrorKind { kIo, kSchema, kChordSymbol, kPolyphony, kCoverage, kMidi, kSidecar, kValidation };

std::string_view to_string(IngestErrorKind kind);

class IngestError : public std::runtime_error {
 public:
  IngestError(IngestErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  IngestErrorKind kind() const { return kind_; }

 private:
  IngestErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

struct QuantizationConfig {
  // Subdivisions per quarter note: 1, 2 or 4.
  int grid = 4;
};

/// Nearest grid point; exact halfway values go to the earlier point.
Rational snap(const Rational& t, const QuantizationConfig& q);

/// Snaps onset and end independently and keeps at least one grid unit of duration.
Note snap_note(const Note& note, const QuantizationConfig& q);

// ---------------------------------------------------------------------------
// Anticipations and chord membership
// ---------------------------------------------------------------------------

struct AnticipationConfig {
  // How far before a chord change an anticipating note may start.
  Rational window{1, 2};
};

/// A note anticipates the next chord when all of these hold:
///  (a) 0 < next.onset - onset <= window,
///  (b) its pitch class is outside the chord sounding at its onset,
///  (c) its pitch class is inside the next chord,
///  (d) it sounds up to (or past) the chord change.
/// Anticipating notes map to the next chord; all others to the chord at their onset.
/// Precondition: every note onset is covered by a chord.
ChordMembership detect_anticipations(const Phrase& phrase, const AnticipationConfig& cfg = {});

/// Throws std::out_of_range for an unknown note index.
std::size_t chord_of(std::size_t note_index, const ChordMembership& membership);

// ---------------------------------------------------------------------------
// Phrase assembly shared by the JSON and MIDI front ends
// ---------------------------------------------------------------------------

using PhraseSpan = std::pair<Rational, Rational>;

/// A note together with its position in the source document, used in error messages.
struct SourceNote {
  Note note;
  std::size_t source_index = 0;
};

/// Sorts notes, rejects polyphony and uncovered onsets, then splits into one
/// phrase per span (or one phrase when `spans` is empty). Chords are clipped
/// to each span. Every returned phrase passes validate_phrase.
std::vector<Phrase> assemble_phrases(const std::string& id, std::vector<SourceNote> notes,
                                     std::vector<ChordEvent> chords, const TimeSignature& ts,
                                     const Rational& anacrusis, const std::vector<PhraseSpan>& spans);

// ---------------------------------------------------------------------------
// Lead-sheet JSON
// ---------------------------------------------------------------------------

/// Parses the canonical lead-sheet JSON document.
///
///   {"meta": {"title": "...", "time_signature": [4, 4], "anacrusis_beats": [0, 1], "grid": 4},
///    "notes": [{"onset": [0, 1], "pitch": 60, "duration": [1, 1]}, ...],
///    "chords": [{"onset": [0, 1], "duration": [4, 1], "symbol": "C"} | {..., "chroma": [1,0,...]}],
///    "phrases": [[0, 8], [8, 16]]}
///
/// Rationals are [num, den] pairs or integers. Notes are snapped to meta.grid.
std::vector<Phrase> parse_leadsheet(std::string_view json_text);

/// Canonical document holding one phrase; parse_leadsheet of the result gives the phrase back.
std::string serialize_phrase(const Phrase& phrase, int grid = 4);

/// Reduction as a lead sheet: the source phrase's meta and chords with the
/// reduced notes, each carrying "tie_to_next" and "sources".
std::string serialize_reduction(const ReducedMelody& melody, const Phrase& source, int grid = 4);

// ---------------------------------------------------------------------------
// Chord sidecar CSV: onset_beat,duration_beats,symbol_or_chroma
// ---------------------------------------------------------------------------

/// Header row optional; '#' at line start or after whitespace starts a comment. The third field is a chord
/// symbol or a 12-character 0/1 chroma string.
std::vector<ChordEvent> parse_chord_csv(std::string_view text);

std::string write_chord_csv(const std::vector<ChordEvent>& chords);

// ---------------------------------------------------------------------------
// MIDI import
// ---------------------------------------------------------------------------

struct MidiImportOptions {
  // Index into the file's track list; default is the first track with notes.
  std::optional<std::size_t> track;
  Rational anacrusis;
  std::vector<PhraseSpan> phrases;
  std::string id = "midi";
};

std::vector<Phrase> import_midi(std::span<const std::uint8_t> midi_bytes, std::string_view chord_csv,
                                const QuantizationConfig& quant, const MidiImportOptions& options = {});

}  // namespace melred

#endif  // MELRED_INGEST_H_
