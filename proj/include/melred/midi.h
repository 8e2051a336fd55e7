// Minimal Standard MIDI File reading and writing (formats 0 and 1).

#ifndef MELRED_MIDI_H_
#define MELRED_MIDI_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "melred/model.h"

namespace melred {

struct MidiNote {
  std::int64_t start_tick = 0;
  std::int64_t end_tick = 0;
  int pitch = 60;
  int velocity = 80;
  int channel = 0;

  bool operator==(const MidiNote&) const = default;
};

struct MidiTrack {
  std::string name;
  std::vector<MidiNote> notes;

  bool operator==(const MidiTrack&) const = default;
};

struct MidiFile {
  int format = 1;
  int ticks_per_quarter = 480;
  std::optional<TimeSignature> time_signature;
  std::vector<MidiTrack> tracks;
};

/// Decodes note on/off pairs per track. Throws IngestError (kMidi) on malformed data.
MidiFile read_midi(std::span<const std::uint8_t> bytes);

/// Writes format 1: a conductor track (tempo 120 bpm, time signature) followed
/// by one track per entry of `file.tracks`. Notes with equal tick order
/// note-offs before note-ons.
std::vector<std::uint8_t> write_midi(const MidiFile& file);

}  // namespace melred

#endif  // MELRED_MIDI_H_
