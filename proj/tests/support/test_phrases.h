// Phrase builders and a seeded random phrase generator shared by the tests.

#ifndef MELRED_TESTS_TEST_PHRASES_H_
#define MELRED_TESTS_TEST_PHRASES_H_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "melred/chords.h"
#include "melred/model.h"

namespace melred::testing {

inline ChordEvent chord(Rational onset, Rational duration, const std::string& symbol) {
  return ChordEvent{onset, duration, *chroma_from_symbol(symbol), symbol};
}

inline Note note(Rational onset, int pitch, Rational duration) { return Note{onset, pitch, duration}; }

inline Phrase make_phrase(std::vector<Note> notes, std::vector<ChordEvent> chords, std::string id = "test") {
  Phrase p;
  p.id = std::move(id);
  p.notes = std::move(notes);
  p.chords = std::move(chords);
  return p;
}

// C4 D4 C4 quarters on beats 0, 1, 2 over one 4-beat C major chord.
inline Phrase c_d_c_phrase() {
  return make_phrase({note(0, 60, 1), note(1, 62, 1), note(2, 60, 1)}, {chord(0, 4, "C")}, "c_d_c");
}

struct RandomPhraseSpec {
  int min_notes = 1;
  int max_notes = 12;
  int min_pitch = 48;
  int max_pitch = 84;
  int max_chords = 4;
};

// Quarter and eighth notes from beat 0 with an occasional eighth rest, over
// 1-4 whole-beat chords that cover every note. The first note starts the timeline.
inline Phrase random_phrase(std::mt19937_64& rng, const RandomPhraseSpec& spec = {}, const std::string& id = "rand") {
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* kRoots[] = {"C", "Db", "D", "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B"};
  static const char* kQualities[] = {"", "m", "7", "maj7", "m7", "dim", "sus4"};

  Phrase p;
  p.id = id;
  const int n = pick(spec.min_notes, spec.max_notes);
  Rational t;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && pick(0, 7) == 0) t += Rational(1, 2);
    const Rational dur = pick(0, 1) == 0 ? Rational(1) : Rational(1, 2);
    p.notes.push_back(Note{t, pick(spec.min_pitch, spec.max_pitch), dur});
    t += dur;
  }
  std::int64_t total = ceil_int(t) + pick(0, 1);
  int chords = std::min<std::int64_t>(pick(1, spec.max_chords), total);
  // Random composition of `total` beats into `chords` positive parts.
  std::vector<std::int64_t> cuts;
  std::vector<std::int64_t> pool;
  for (std::int64_t b = 1; b < total; ++b) pool.push_back(b);
  std::shuffle(pool.begin(), pool.end(), rng);
  cuts.assign(pool.begin(), pool.begin() + (chords - 1));
  cuts.push_back(0);
  cuts.push_back(total);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    std::string symbol = std::string(kRoots[pick(0, 11)]) + kQualities[pick(0, 6)];
    p.chords.push_back(chord(Rational(cuts[c]), Rational(cuts[c + 1] - cuts[c]), symbol));
  }
  return p;
}

inline std::vector<Phrase> random_corpus(std::uint64_t seed, std::size_t count, const RandomPhraseSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Phrase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_phrase(rng, spec, "rand" + std::to_string(i)));
  return out;
}

}  // namespace melred::testing

#endif  // MELRED_TESTS_TEST_PHRASES_H_
