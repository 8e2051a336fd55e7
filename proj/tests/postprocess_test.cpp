#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "melred/postprocess.h"
#include "test_phrases.h"

namespace melred {
namespace {

using testing::c_d_c_phrase;
using testing::chord;
using testing::make_phrase;
using testing::note;

struct Pipeline {
  Phrase phrase;
  ChordMembership membership;
  ReductionGraph graph;
};

Pipeline prepare(Phrase p, const CostConfig& cfg = {}) {
  Pipeline out{std::move(p), {}, {}};
  out.membership = detect_anticipations(out.phrase);
  out.graph = build_graph(out.phrase, out.membership, cfg);
  return out;
}

std::vector<std::vector<std::size_t>> sources_of(const std::vector<NoteGroup>& groups) {
  std::vector<std::vector<std::size_t>> out;
  for (const NoteGroup& g : groups) out.push_back(g.sources);
  return out;
}

std::vector<Rational> durations_of(const ReducedMelody& m) {
  std::vector<Rational> out;
  for (const ReducedNote& n : m.notes) out.push_back(n.duration);
  return out;
}

TEST(MergeProlongationsTest, PeThenLe) {
  Pipeline pl = prepare(make_phrase({note(0, 60, 1), note(1, 60, 1), note(2, 62, 2)}, {chord(0, 4, "C")}));
  ReductionPath path = make_path(pl.graph, {0, 1, 2});
  ASSERT_EQ(path.categories, (std::vector<EdgeCategory>{EdgeCategory::kProlongation, EdgeCategory::kLinear}));
  auto groups = merge_prolongations(pl.phrase, path, pl.graph, pl.membership);
  EXPECT_EQ(sources_of(groups), (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
  EXPECT_EQ(groups[0].pitch, 60);
  EXPECT_EQ(groups[1].onset, Rational(2));
}

TEST(MergeProlongationsTest, LeLeStaysSeparate) {
  Pipeline pl = prepare(c_d_c_phrase());
  auto groups = merge_prolongations(pl.phrase, make_path(pl.graph, {0, 1, 2}), pl.graph, pl.membership);
  EXPECT_EQ(sources_of(groups), (std::vector<std::vector<std::size_t>>{{0}, {1}, {2}}));
}

TEST(MergeProlongationsTest, PePeIsOneGroup) {
  Pipeline pl = prepare(make_phrase({note(0, 64, 1), note(1, 64, 1), note(2, 64, 2)}, {chord(0, 4, "C")}));
  auto groups = merge_prolongations(pl.phrase, make_path(pl.graph, {0, 1, 2}), pl.graph, pl.membership);
  EXPECT_EQ(sources_of(groups), (std::vector<std::vector<std::size_t>>{{0, 1, 2}}));
}

TEST(MergeProlongationsTest, PeAcrossChordsIsNotMerged) {
  Pipeline pl = prepare(make_phrase({note(0, 67, 4), note(4, 67, 4)}, {chord(0, 4, "C"), chord(4, 4, "G")}));
  auto groups = merge_prolongations(pl.phrase, make_path(pl.graph, {0, 1}), pl.graph, pl.membership);
  EXPECT_EQ(groups.size(), 2u);
}

TEST(AllocateBinsTest, OneBinPerChord) {
  std::vector<NoteGroup> groups = {{{0}, 60, 0, 0}, {{1}, 67, 4, 1}};
  auto bins = allocate_bins(groups, {chord(0, 4, "C"), chord(4, 4, "G")});
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_EQ(bins[0].members, (std::vector<std::size_t>{0}));
  EXPECT_EQ(bins[1].members, (std::vector<std::size_t>{1}));
  EXPECT_EQ(bins[1].onset, Rational(4));
  EXPECT_EQ(bins[1].length, 4);
}

TEST(AllocateBinsTest, AnticipationGoesToNextBin) {
  Pipeline pl = prepare(make_phrase({note(0, 60, Rational(7, 2)), note(Rational(7, 2), 65, Rational(9, 2))},
                                    {chord(0, 4, "C"), chord(4, 4, "F")}));
  auto groups = merge_prolongations(pl.phrase, make_path(pl.graph, {0, 1}), pl.graph, pl.membership);
  auto bins = allocate_bins(groups, pl.phrase.chords);
  EXPECT_EQ(bins[0].members, (std::vector<std::size_t>{0}));
  EXPECT_EQ(bins[1].members, (std::vector<std::size_t>{1}));
}

TEST(AllocateBinsTest, FractionalChords) {
  const std::vector<ChordEvent> chords = {chord(0, Rational(7, 2), "C"), chord(Rational(7, 2), Rational(9, 2), "G")};
  EXPECT_THROW(allocate_bins({}, chords), std::invalid_argument);
  auto bins = allocate_bins({}, chords, ChordRounding::kNearest);
  EXPECT_EQ(bins[0].length, 3);
  EXPECT_EQ(bins[1].onset, Rational(3));
  EXPECT_EQ(bins[1].length, 5);
  EXPECT_THROW(allocate_bins({}, {chord(0, Rational(1, 4), "C")}, ChordRounding::kNearest), std::invalid_argument);
}

TEST(RhythmTemplateTest, FrontLoaded) {
  EXPECT_EQ(front_loaded_template(4, 2), (std::vector<std::int64_t>{2, 2}));
  EXPECT_EQ(front_loaded_template(4, 3), (std::vector<std::int64_t>{2, 1, 1}));
  EXPECT_EQ(front_loaded_template(4, 1), (std::vector<std::int64_t>{4}));
  EXPECT_EQ(front_loaded_template(7, 3), (std::vector<std::int64_t>{3, 2, 2}));
  EXPECT_THROW(front_loaded_template(2, 3), std::invalid_argument);
  for (std::int64_t length = 1; length <= 16; ++length) {
    for (std::int64_t count = 1; count <= length; ++count) {
      auto d = front_loaded_template(length, count);
      EXPECT_EQ(std::accumulate(d.begin(), d.end(), std::int64_t{0}), length);
      EXPECT_TRUE(std::is_sorted(d.rbegin(), d.rend()));
      EXPECT_GE(*std::min_element(d.begin(), d.end()), 1);
    }
  }
}

ChordBin bin_with(std::size_t members, std::int64_t length, std::size_t chord_index = 0) {
  ChordBin bin;
  bin.chord_index = chord_index;
  bin.length = length;
  for (std::size_t m = 0; m < members; ++m) bin.members.push_back(m);
  return bin;
}

TEST(OmissionTest, NoOverflowKeepsEverything) {
  EXPECT_EQ(choose_survivors(bin_with(3, 4), {}), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(OmissionTest, TwoBeatBinKeepsEndpoints) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(choose_survivors(bin_with(4, 2), {seed, true}), (std::vector<std::size_t>{0, 3}));
  }
}

TEST(OmissionTest, OneBeatBinKeepsFirst) {
  EXPECT_EQ(choose_survivors(bin_with(3, 1), {7, true}), (std::vector<std::size_t>{0}));
}

TEST(OmissionTest, SeededAndUnbiased) {
  const ChordBin bin = bin_with(6, 3);
  EXPECT_EQ(choose_survivors(bin, {42, false}), choose_survivors(bin, {42, false}));
  std::vector<int> hits(6, 0);
  std::set<std::vector<std::size_t>> distinct;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    auto keep = choose_survivors(bin, {seed, false});
    ASSERT_EQ(keep.size(), 3u);
    EXPECT_TRUE(std::is_sorted(keep.begin(), keep.end()));
    for (std::size_t k : keep) ++hits[k];
    distinct.insert(keep);
  }
  // Each member survives about half the time.
  for (int h : hits) {
    EXPECT_GT(h, 220);
    EXPECT_LT(h, 380);
  }
  EXPECT_EQ(distinct.size(), 20u);
}

TEST(OmissionTest, ChordIndexChangesTheDraw) {
  std::size_t differing = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    if (choose_survivors(bin_with(8, 3, 0), {seed, false}) != choose_survivors(bin_with(8, 3, 1), {seed, false})) {
      ++differing;
    }
  }
  EXPECT_GT(differing, 10u);
}

TEST(ApplyTemplateTest, TilesTheBin) {
  std::vector<NoteGroup> groups = {{{0}, 60, 0, 0}, {{1}, 62, 1, 0}, {{2}, 64, 2, 0}};
  ChordBin bin = bin_with(3, 4);
  bin.onset = 8;
  auto notes = apply_rhythm_template(bin, groups, front_loaded_template, {});
  ASSERT_EQ(notes.size(), 3u);
  EXPECT_EQ(notes[0].onset, Rational(8));
  EXPECT_EQ(notes[1].onset, Rational(10));
  EXPECT_EQ(notes[2].onset, Rational(11));
  EXPECT_EQ(notes[2].pitch, 64);
  EXPECT_EQ(notes[1].source_indices, (std::vector<std::size_t>{1}));
  EXPECT_TRUE(apply_rhythm_template(bin_with(0, 4), groups, front_loaded_template, {}).empty());
}

TEST(ApplyTemplateTest, RejectsBrokenTemplates) {
  std::vector<NoteGroup> groups = {{{0}, 60, 0, 0}};
  RhythmTemplate bad = [](std::int64_t, std::int64_t) { return std::vector<std::int64_t>{1}; };
  EXPECT_THROW(apply_rhythm_template(bin_with(1, 4), groups, bad, {}), std::logic_error);
}

TEST(SuspensionTest, PeAcrossBinsBecomesTie) {
  Pipeline pl = prepare(make_phrase({note(0, 67, 4), note(4, 67, 2), note(6, 65, 2)},
                                    {chord(0, 4, "C"), chord(4, 4, "G7")}));
  ReductionPath path = make_path(pl.graph, {0, 1, 2});
  Realization r = realize_path(pl.phrase, pl.membership, pl.graph, path, {});
  ASSERT_EQ(r.melody.notes.size(), 3u);
  EXPECT_TRUE(r.melody.notes[0].tie_to_next);
  EXPECT_FALSE(r.melody.notes[1].tie_to_next);
  EXPECT_FALSE(r.melody.notes[2].tie_to_next);
}

TEST(SuspensionTest, OmittedEndpointDropsTheTie) {
  // The one-beat first bin holds C4 and G4; only C4 survives, so the G4 prolongation has no tie.
  Pipeline pl = prepare(make_phrase({note(0, 60, Rational(1, 2)), note(Rational(1, 2), 67, Rational(1, 2)), note(1, 67, 4)},
                                    {chord(0, 1, "C"), chord(1, 4, "C")}));
  ReductionPath path = make_path(pl.graph, {0, 1, 2});
  ASSERT_EQ(path.categories.back(), EdgeCategory::kProlongation);
  Realization r = realize_path(pl.phrase, pl.membership, pl.graph, path, {0, true});
  EXPECT_TRUE(r.overflowed);
  ASSERT_EQ(r.melody.notes.size(), 2u);
  EXPECT_EQ(r.melody.notes[0].pitch, 60);
  EXPECT_FALSE(r.melody.notes[0].tie_to_next);
}

TEST(SuspensionTest, EmptyBinExtendsPreviousNote) {
  Pipeline pl = prepare(make_phrase({note(0, 60, 4), note(4, 62, 4), note(8, 64, 4)},
                                    {chord(0, 4, "C"), chord(4, 4, "C"), chord(8, 4, "C")}));
  Realization r = realize_path(pl.phrase, pl.membership, pl.graph, make_path(pl.graph, {0, 2}), {});
  ASSERT_EQ(r.melody.notes.size(), 2u);
  EXPECT_EQ(r.melody.notes[0].duration, Rational(8));
  EXPECT_EQ(r.melody.notes[1].onset, Rational(8));
}

TEST(ReducePhraseTest, WorkedExample) {
  ReducedMelody m = reduce_phrase(c_d_c_phrase(), CostConfig{});
  EXPECT_EQ(m.phrase_ref, "c_d_c");
  EXPECT_EQ(durations_of(m), (std::vector<Rational>{2, 1, 1}));
  ASSERT_EQ(m.notes.size(), 3u);
  EXPECT_EQ(m.notes[0].pitch, 60);
  EXPECT_EQ(m.notes[1].pitch, 62);
  EXPECT_EQ(m.notes[2].pitch, 60);
  EXPECT_EQ(m.notes[2].end(), Rational(4));
}

TEST(ReducePhraseTest, SingleNoteFillsTheChord) {
  ReducedMelody m = reduce_phrase(make_phrase({note(0, 60, 1)}, {chord(0, 4, "C")}), CostConfig{});
  ASSERT_EQ(m.notes.size(), 1u);
  EXPECT_EQ(m.notes[0].duration, Rational(4));
}

TEST(ReducePhraseTest, LowEtaGivesFewerNotes) {
  CostConfig cfg;
  cfg.eta = 0.5;
  ReducedMelody m = reduce_phrase(c_d_c_phrase(), cfg);
  ASSERT_EQ(m.notes.size(), 1u);
  EXPECT_EQ(m.notes[0].pitch, 60);
  EXPECT_EQ(m.notes[0].duration, Rational(4));
  EXPECT_EQ(m.notes[0].source_indices, (std::vector<std::size_t>{0, 2}));
}

TEST(ReducePhraseTest, RejectsInvalidInput) {
  Phrase bad = c_d_c_phrase();
  bad.notes[1].onset = Rational(1, 2);
  EXPECT_THROW(reduce_phrase(bad, CostConfig{}), std::invalid_argument);
  CostConfig cfg;
  cfg.eta = 0;
  EXPECT_THROW(reduce_phrase(c_d_c_phrase(), cfg), std::invalid_argument);
}

TEST(ReducePhraseTest, KBestRealizations) {
  Reduction r = reduce_phrase_detailed(c_d_c_phrase(), CostConfig{}, {}, ReduceOptions{{}, {}, front_loaded_template, 3, {}});
  ASSERT_EQ(r.realizations.size(), 2u);
  EXPECT_EQ(r.realizations[0].melody.notes.size(), 3u);
  EXPECT_EQ(r.realizations[1].melody.notes.size(), 1u);
}

TEST(ReducePhraseTest, InvariantsOnRandomPhrases) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 300; ++trial) {
    Phrase p = testing::random_phrase(rng);
    Reduction r = reduce_phrase_detailed(p, CostConfig{}, {static_cast<std::uint64_t>(trial), true});
    const Realization& best = r.realizations.front();
    const ReducedMelody& m = best.melody;
    Rational total;
    for (const ReducedNote& n : m.notes) {
      total += n.duration;
      EXPECT_TRUE(is_integer(n.onset));
      EXPECT_TRUE(is_integer(n.duration));
      ASSERT_FALSE(n.source_indices.empty());
      EXPECT_EQ(n.pitch, p.notes[n.source_indices.front()].pitch);
    }
    EXPECT_EQ(total, p.end() - p.start());
    EXPECT_LE(m.notes.size(), best.path.nodes.size());
    EXPECT_LE(best.path.nodes.size(), p.notes.size());
    EXPECT_EQ(m, reduce_phrase(p, CostConfig{}, {static_cast<std::uint64_t>(trial), true}));
  }
}

TEST(BinsJsonTest, ListsMembers) {
  Pipeline pl = prepare(c_d_c_phrase());
  auto groups = merge_prolongations(pl.phrase, shortest_path(pl.graph), pl.graph, pl.membership);
  auto j = bins_to_json(allocate_bins(groups, pl.phrase.chords), groups);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["length"], 4);
  EXPECT_EQ(j[0]["members"].size(), 3u);
}

}  // namespace
}  // namespace melred
