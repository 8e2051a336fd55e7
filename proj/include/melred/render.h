// Text piano roll and MIDI export of melodies and their reductions.

#ifndef MELRED_RENDER_H_
#define MELRED_RENDER_H_

#include <string>
#include <vector>

#include "melred/midi.h"
#include "melred/model.h"

namespace melred {

/// Fixed-width piano roll, one column per sixteenth and one row per sounding
/// pitch (highest first), padded to whole measures. Sounding cells are '#',
/// empty cells '-'. A note re-attacked right after the same pitch starts
/// with '+'; a tied continuation does not. The footer row shows chord labels
/// at their onsets.
///
///       |1...2...3...4...|
///   C4  |####------------|
///   Chd |C               |
std::string render_ascii_roll(const std::vector<ReducedNote>& melody, const std::vector<ChordEvent>& chords,
                              const TimeSignature& ts = {});

/// Plain notes as an untied melody, for rendering originals.
std::vector<ReducedNote> as_reduced_notes(const std::vector<Note>& notes);

/// Joins each tied run into one note.
std::vector<ReducedNote> merge_ties(const std::vector<ReducedNote>& notes);

inline constexpr int kExportTicksPerQuarter = 480;

/// Format 1 file: conductor track, then "original" (all phrases' notes), then
/// "reduction" (tied runs sound as one note).
MidiFile reduction_to_midi(const std::vector<Phrase>& originals, const std::vector<ReducedMelody>& reductions);

}  // namespace melred

#endif  // MELRED_RENDER_H_
