#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "melred/chords.h"
#include "melred/model.h"
#include "test_phrases.h"

namespace melred {
namespace {

using testing::c_d_c_phrase;
using testing::chord;
using testing::make_phrase;
using testing::note;

bool has_rule(const std::vector<Violation>& v, const std::string& rule, std::size_t index) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rule && x.index == index; });
}

TEST(RationalTest, FloorAndCeil) {
  EXPECT_EQ(floor_int(Rational(7, 2)), 3);
  EXPECT_EQ(ceil_int(Rational(7, 2)), 4);
  EXPECT_EQ(floor_int(Rational(-1, 2)), -1);
  EXPECT_EQ(ceil_int(Rational(-1, 2)), 0);
  EXPECT_EQ(floor_int(Rational(4)), 4);
  EXPECT_EQ(ceil_int(Rational(4)), 4);
}

TEST(RationalTest, IntegerComparisonTerminates) {
  Rational zero;
  EXPECT_TRUE(zero == 0);
  EXPECT_TRUE(0 == zero);
  EXPECT_TRUE(Rational(1, 2) != 0);
  EXPECT_FALSE(Rational(4, 2) != 2);
}

TEST(RationalTest, Parse) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational(" 3/2 "), Rational(3, 2));
  EXPECT_EQ(parse_rational("1.25"), Rational(5, 4));
  EXPECT_EQ(parse_rational("-1"), Rational(-1));
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(Rational(2)), "2");
}

TEST(ModelTest, PitchClass) {
  EXPECT_EQ(pitch_class(60), 0);
  EXPECT_EQ(pitch_class(61), 1);
  EXPECT_EQ(pitch_class(71), 11);
  EXPECT_EQ(pitch_class(0), 0);
  EXPECT_EQ(pitch_class(127), 7);
}

TEST(ModelTest, NoteName) {
  EXPECT_EQ(note_name(60), "C4");
  EXPECT_EQ(note_name(69), "A4");
  EXPECT_EQ(note_name(0), "C-1");
  EXPECT_EQ(note_name(61), "C#4");
}

TEST(ModelTest, MeasureLength) {
  EXPECT_EQ((TimeSignature{4, 4}).measure_length(), Rational(4));
  EXPECT_EQ((TimeSignature{3, 4}).measure_length(), Rational(3));
  EXPECT_EQ((TimeSignature{6, 8}).measure_length(), Rational(3));
  EXPECT_EQ((TimeSignature{2, 2}).measure_length(), Rational(4));
}

TEST(ModelTest, MeasurePosition) {
  const TimeSignature ts{4, 4};
  EXPECT_EQ(measure_position(4, ts, 0), (MeasurePosition{1, 0}));
  EXPECT_EQ(measure_position(Rational(5, 2), ts, 0), (MeasurePosition{0, Rational(5, 2)}));
  // Pickup of one beat: the first downbeat is at beat 1.
  EXPECT_EQ(measure_position(1, ts, 1), (MeasurePosition{0, 0}));
  EXPECT_EQ(measure_position(0, ts, 1), (MeasurePosition{-1, 3}));
  EXPECT_EQ(measure_position(6, TimeSignature{3, 4}, 0), (MeasurePosition{2, 0}));
}

TEST(ModelTest, ChordAt) {
  std::vector<ChordEvent> chords = {chord(0, 4, "C"), chord(4, 4, "G"), chord(10, 2, "F")};
  EXPECT_EQ(chord_at(chords, 0), 0u);
  EXPECT_EQ(chord_at(chords, Rational(39, 10)), 0u);
  EXPECT_EQ(chord_at(chords, 4), 1u);
  EXPECT_FALSE(chord_at(chords, 8).has_value());
  EXPECT_FALSE(chord_at(chords, -1).has_value());
  EXPECT_EQ(chord_at(chords, 11), 2u);
  EXPECT_FALSE(chord_at(chords, 12).has_value());
}

TEST(ModelTest, PhraseSpan) {
  Phrase p = make_phrase({note(2, 60, 1)}, {chord(1, 3, "C"), chord(4, 2, "G")});
  EXPECT_EQ(p.start(), Rational(1));
  EXPECT_EQ(p.end(), Rational(6));
}

TEST(ValidatePhraseTest, WorkedExampleIsValid) { EXPECT_TRUE(validate_phrase(c_d_c_phrase()).empty()); }

TEST(ValidatePhraseTest, EmptyPhrase) {
  Phrase p = make_phrase({}, {chord(0, 4, "C")});
  EXPECT_TRUE(has_rule(validate_phrase(p), "empty", 0));
}

TEST(ValidatePhraseTest, NoteRules) {
  Phrase p = make_phrase({note(-1, 60, 1), note(0, 128, 1), note(1, 60, 0), note(Rational(1, 2), 60, 1),
                          note(Rational(3, 4), 62, 1)},
                         {chord(-1, 8, "C")});
  auto v = validate_phrase(p);
  EXPECT_TRUE(has_rule(v, "onset", 0));
  EXPECT_TRUE(has_rule(v, "pitch-range", 1));
  EXPECT_TRUE(has_rule(v, "duration", 2));
  EXPECT_TRUE(has_rule(v, "order", 3));
  EXPECT_TRUE(has_rule(v, "overlap", 4));
}

TEST(ValidatePhraseTest, ChordRules) {
  ChordEvent silent{4, 4, Chroma{}, ""};
  Phrase p = make_phrase({note(0, 60, 1)}, {chord(0, 0, "C"), chord(0, 5, "C"), silent});
  auto v = validate_phrase(p);
  EXPECT_TRUE(has_rule(v, "chord-duration", 0));
  EXPECT_TRUE(has_rule(v, "chord-chroma", 2));
  EXPECT_TRUE(has_rule(v, "chord-order", 2));
}

TEST(ValidatePhraseTest, UncoveredOnset) {
  Phrase p = make_phrase({note(0, 60, 1), note(5, 60, 1)}, {chord(0, 4, "C")});
  auto v = validate_phrase(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "uncovered-onset");
  EXPECT_EQ(v[0].index, 1u);
}

TEST(ValidatePhraseTest, TimeSignatureAndAnacrusis) {
  Phrase p = c_d_c_phrase();
  p.time_signature = {3, 5};
  p.anacrusis = -1;
  auto v = validate_phrase(p);
  EXPECT_TRUE(has_rule(v, "time-signature", 0));
  EXPECT_TRUE(has_rule(v, "anacrusis", 0));
}

TEST(ChordsTest, Symbols) {
  EXPECT_EQ(chroma_to_bits(*chroma_from_symbol("C")), "100010010000");
  EXPECT_EQ(chroma_to_bits(*chroma_from_symbol("Am")), "100010000100");
  EXPECT_EQ(chroma_to_bits(*chroma_from_symbol("G7")), "001001010001");
  EXPECT_EQ(*chroma_from_symbol("Bb:maj7"), *chroma_from_symbol("A#maj7"));
  EXPECT_EQ(*chroma_from_symbol("Cmin"), *chroma_from_symbol("Cm"));
  EXPECT_EQ(chroma_to_bits(*chroma_from_symbol("Bdim")), "001001000001");
  EXPECT_FALSE(chroma_from_symbol("H").has_value());
  EXPECT_FALSE(chroma_from_symbol("Cxyz").has_value());
  EXPECT_FALSE(chroma_from_symbol("").has_value());
}

TEST(ChordsTest, Bits) {
  auto c = chroma_from_bits("100010010000");
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, *chroma_from_symbol("C"));
  EXPECT_FALSE(chroma_from_bits("10001001000").has_value());
  EXPECT_FALSE(chroma_from_bits("10001001000x").has_value());
  EXPECT_EQ(chord_label(*c), "C");
  EXPECT_EQ(chord_label(*chroma_from_bits("110000000000")), "110000000000");
}

}  // namespace
}  // namespace melred
