// Chord symbol vocabulary and chroma helpers.

#ifndef MELRED_CHORDS_H_
#define MELRED_CHORDS_H_

#include <optional>
#include <string>
#include <string_view>

#include "melred/model.h"

namespace melred {

/// Resolves a symbol such as "C", "F#m7", "Bb:maj7" or "Gsus4" to a chroma.
///
/// Roots are A-G with optional '#' or 'b'. Qualities: maj (or empty), min/m,
/// dim, aug, 7, maj7, min7/m7, sus2, sus4. A ':' between root and quality is allowed.
std::optional<Chroma> chroma_from_symbol(std::string_view symbol);

/// Parses a 12-character 0/1 string, index 0 first ("100010010000" is C major).
std::optional<Chroma> chroma_from_bits(std::string_view bits);

std::string chroma_to_bits(const Chroma& chroma);

/// Best-effort label for display: a vocabulary symbol when the chroma matches one,
/// else the bit string.
std::string chord_label(const Chroma& chroma);

}  // namespace melred

#endif  // MELRED_CHORDS_H_
