#include "melred/model.h"

#include <algorithm>
#include <array>

namespace melred {

Rational Phrase::start() const {
  if (!chords.empty()) return chords.front().onset;
  return notes.empty() ? Rational(0) : notes.front().onset;
}

Rational Phrase::end() const {
  if (!chords.empty()) return chords.back().end();
  return notes.empty() ? Rational(0) : notes.back().end();
}

MeasurePosition measure_position(const Rational& onset, const TimeSignature& ts, const Rational& anacrusis) {
  const Rational length = ts.measure_length();
  const Rational shifted = onset - anacrusis;
  const std::int64_t index = floor_int(shifted / length);
  return {index, shifted - Rational(index) * length};
}

std::optional<std::size_t> chord_at(const std::vector<ChordEvent>& chords, const Rational& t) {
  auto it = std::upper_bound(chords.begin(), chords.end(), t,
                             [](const Rational& value, const ChordEvent& c) { return value < c.onset; });
  if (it == chords.begin()) return std::nullopt;
  --it;
  if (t < it->end()) return static_cast<std::size_t>(it - chords.begin());
  return std::nullopt;
}

std::vector<Violation> validate_phrase(const Phrase& p) {
  std::vector<Violation> out;
  auto add = [&out](std::size_t index, std::string rule, std::string message) {
    out.push_back({index, std::move(rule), std::move(message)});
  };

  const TimeSignature& ts = p.time_signature;
  bool pow2 = ts.denominator > 0 && (ts.denominator & (ts.denominator - 1)) == 0;
  if (ts.numerator <= 0 || !pow2) {
    add(0, "time-signature",
        "invalid time signature " + std::to_string(ts.numerator) + "/" + std::to_string(ts.denominator));
  }
  if (p.anacrusis < 0) add(0, "anacrusis", "anacrusis is negative");
  if (p.notes.empty()) add(0, "empty", "phrase has no notes");

  for (std::size_t i = 0; i < p.notes.size(); ++i) {
    const Note& n = p.notes[i];
    if (n.onset < 0) add(i, "onset", "note " + std::to_string(i) + " has negative onset");
    if (n.pitch < 0 || n.pitch > 127) {
      add(i, "pitch-range", "note " + std::to_string(i) + " pitch " + std::to_string(n.pitch) + " outside 0..127");
    }
    if (n.duration <= 0) add(i, "duration", "note " + std::to_string(i) + " has non-positive duration");
    if (i == 0) continue;
    const Note& prev = p.notes[i - 1];
    if (n.onset < prev.onset) {
      add(i, "order", "note " + std::to_string(i) + " starts before note " + std::to_string(i - 1));
    } else if (n.onset < prev.end()) {
      add(i, "overlap", "note " + std::to_string(i) + " overlaps note " + std::to_string(i - 1));
    }
  }

  for (std::size_t k = 0; k < p.chords.size(); ++k) {
    const ChordEvent& c = p.chords[k];
    if (c.duration <= 0) add(k, "chord-duration", "chord " + std::to_string(k) + " has non-positive duration");
    if (c.chroma.none()) add(k, "chord-chroma", "chord " + std::to_string(k) + " has an empty chroma");
    if (k > 0 && c.onset < p.chords[k - 1].end()) {
      add(k, "chord-order", "chord " + std::to_string(k) + " starts before chord " + std::to_string(k - 1) + " ends");
    }
  }

  for (std::size_t i = 0; i < p.notes.size(); ++i) {
    if (!chord_at(p.chords, p.notes[i].onset)) {
      add(i, "uncovered-onset",
          "note " + std::to_string(i) + " onset " + to_string(p.notes[i].onset) + " is not under any chord");
    }
  }
  return out;
}

std::string note_name(int pitch) {
  static constexpr std::array<const char*, 12> kNames = {"C",  "C#", "D",  "D#", "E",  "F",
                                                         "F#", "G",  "G#", "A",  "A#", "B"};
  int octave = (pitch >= 0 ? pitch / 12 : (pitch - 11) / 12) - 1;
  return std::string(kNames[static_cast<std::size_t>(pitch_class(pitch))]) + std::to_string(octave);
}

}  // namespace melred
