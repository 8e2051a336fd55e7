// Quantized symbolic-music types shared by every stage of the reduction.

#ifndef MELRED_MODEL_H_
#define MELRED_MODEL_H_

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melred/rational.h"

namespace melred {

/// One melody event. Onset and duration are in quarter-note beats.
struct Note {
  Rational onset;
  int pitch = 60;
  Rational duration{1};

  Rational end() const { return onset + duration; }
  bool operator==(const Note&) const = default;
};

/// Bit k set means pitch class k sounds in the chord.
using Chroma = std::bitset<12>;

struct ChordEvent {
  Rational onset;
  Rational duration{1};
  Chroma chroma;
  // Display label only; the chroma is authoritative.
  std::string symbol;

  Rational end() const { return onset + duration; }
  bool contains(int pitch_class) const { return chroma.test(static_cast<std::size_t>(pitch_class)); }
  bool operator==(const ChordEvent&) const = default;
};

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;

  /// Measure length in quarter beats.
  Rational measure_length() const { return Rational(numerator) * Rational(4, denominator); }
  bool operator==(const TimeSignature&) const = default;
};

/// The unit of reduction: an ordered monophonic note sequence over a chord timeline.
/// Times are absolute beats from the start of the piece.
struct Phrase {
  std::string id;
  std::vector<Note> notes;
  std::vector<ChordEvent> chords;
  TimeSignature time_signature;
  // Beats before the first full measure.
  Rational anacrusis;

  /// Start of the chord timeline.
  Rational start() const;
  /// End of the chord timeline.
  Rational end() const;

  bool operator==(const Phrase&) const = default;
};

/// Note-to-chord assignment after anticipation handling.
struct ChordMembership {
  std::vector<std::size_t> chord_index;
  std::vector<bool> anticipation;

  bool operator==(const ChordMembership&) const = default;
};

struct ReducedNote {
  Rational onset;
  int pitch = 60;
  Rational duration{1};
  // Sustained across the following chord boundary (suspension).
  bool tie_to_next = false;
  std::vector<std::size_t> source_indices;

  Rational end() const { return onset + duration; }
  bool operator==(const ReducedNote&) const = default;
};

struct ReducedMelody {
  std::vector<ReducedNote> notes;
  std::string phrase_ref;

  bool operator==(const ReducedMelody&) const = default;
};

/// Pitch modulo 12, so C is 0.
constexpr int pitch_class(int pitch) { return ((pitch % 12) + 12) % 12; }

struct MeasurePosition {
  // -1 inside the pickup region.
  std::int64_t measure_index = 0;
  Rational beat_in_measure;

  bool operator==(const MeasurePosition&) const = default;
};

/// Locates an onset on the measure grid. The first full measure starts at `anacrusis`.
MeasurePosition measure_position(const Rational& onset, const TimeSignature& ts, const Rational& anacrusis);

struct Violation {
  std::size_t index = 0;
  std::string rule;
  std::string message;
};

/// Checks every Phrase invariant; an empty result means the phrase is valid.
///
/// Rules: "empty", "time-signature", "anacrusis", "onset", "pitch-range",
/// "duration", "order", "overlap", "chord-duration", "chord-chroma",
/// "chord-order", "uncovered-onset". Note rules index notes, chord rules index chords.
std::vector<Violation> validate_phrase(const Phrase& phrase);

/// Index of the chord sounding at time t, if any.
std::optional<std::size_t> chord_at(const std::vector<ChordEvent>& chords, const Rational& t);

/// Scientific pitch name, middle C (60) is "C4".
std::string note_name(int pitch);

}  // namespace melred

#endif  // MELRED_MODEL_H_
