#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "melred/ingest.h"
#include "melred/reduction_graph.h"
#include "test_phrases.h"

namespace melred {
namespace {

using testing::c_d_c_phrase;
using testing::chord;
using testing::make_phrase;
using testing::note;

constexpr double kTol = 1e-9;

EdgeCategory classify(int from, int to, Rational gap = 1, bool same_chord = true) {
  return classify_edge(Note{0, from, 1}, Note{gap, to, 1}, same_chord, Rational(8));
}

TEST(ClassifyEdgeTest, SpecExamples) {
  EXPECT_EQ(classify(60, 60), EdgeCategory::kProlongation);
  EXPECT_EQ(classify(60, 62), EdgeCategory::kLinear);
  EXPECT_EQ(classify(60, 72), EdgeCategory::kImaginaryProlongation);
  EXPECT_EQ(classify(59, 60), EdgeCategory::kLinear);
  EXPECT_EQ(classify(60, 74), EdgeCategory::kImaginaryLinear);
  EXPECT_EQ(classify(59, 72), EdgeCategory::kImaginaryLinear);
  EXPECT_EQ(classify(60, 64), EdgeCategory::kArpeggiation);
  EXPECT_EQ(classify(60, 64, 1, false), EdgeCategory::kUnclassified);
}

TEST(ClassifyEdgeTest, ThresholdIsStrict) {
  EXPECT_EQ(classify(60, 60, 8), EdgeCategory::kUnclassified);
  EXPECT_EQ(classify(60, 62, 8), EdgeCategory::kUnclassified);
  EXPECT_EQ(classify(60, 60, Rational(31, 4)), EdgeCategory::kProlongation);
  // Arpeggiation ignores the gap.
  EXPECT_EQ(classify(60, 67, 20), EdgeCategory::kArpeggiation);
}

TEST(ClassifyEdgeTest, PitchClassDifferenceIsNotFolded) {
  // pc 11 -> pc 2: |11 - 2| = 9, an arpeggiation candidate rather than a second.
  EXPECT_EQ(classify(59, 74), EdgeCategory::kArpeggiation);
  // pc 0 -> pc 10 is a compound second under the {10, 11} rule.
  EXPECT_EQ(classify(60, 46), EdgeCategory::kImaginaryLinear);
}

TEST(ClassifyEdgeTest, PhraseOverloadUsesMembership) {
  // F4 at beat 3.5 anticipates the F chord.
  Phrase p = make_phrase({note(0, 65, Rational(7, 2)), note(Rational(7, 2), 65, Rational(1, 2)), note(4, 69, 1)},
                         {chord(0, 4, "C"), chord(4, 4, "F")});
  ChordMembership m = detect_anticipations(p);
  CostConfig cfg;
  EXPECT_EQ(classify_edge(p, m, 1, 2, cfg), EdgeCategory::kArpeggiation);
  EXPECT_EQ(classify_edge(p, m, 0, 2, cfg), EdgeCategory::kUnclassified);
}

TEST(ThresholdTest, MeasuresToBeats) {
  CostConfig cfg;
  EXPECT_EQ(temporal_threshold(TimeSignature{4, 4}, cfg), Rational(8));
  EXPECT_EQ(temporal_threshold(TimeSignature{3, 4}, cfg), Rational(6));
  EXPECT_EQ(temporal_threshold(TimeSignature{6, 8}, cfg), Rational(6));
  cfg.D_measures = 1;
  EXPECT_EQ(temporal_threshold(TimeSignature{4, 4}, cfg), Rational(4));
}

TEST(CostTermsTest, TonalTable) {
  CostConfig cfg;
  EXPECT_EQ(tonal_cost(EdgeCategory::kProlongation, cfg), 0.1);
  EXPECT_EQ(tonal_cost(EdgeCategory::kLinear, cfg), 0.3);
  EXPECT_EQ(tonal_cost(EdgeCategory::kArpeggiation, cfg), 1.5);
  EXPECT_EQ(tonal_cost(EdgeCategory::kImaginaryProlongation, cfg), 1.0);
  EXPECT_EQ(tonal_cost(EdgeCategory::kImaginaryLinear, cfg), 1.3);
  EXPECT_EQ(tonal_cost(EdgeCategory::kUnclassified, cfg), 3.0);
}

TEST(CostTermsTest, Temporal) {
  CostConfig cfg;
  EXPECT_NEAR(temporal_cost(0, 1, cfg), 1.0, 1e-12);
  EXPECT_NEAR(temporal_cost(1, 3, cfg), 3.0314331330207964, 1e-12);
  EXPECT_NEAR(temporal_cost(0, 4, cfg), 9.18958683997628, 1e-12);
  EXPECT_THROW(temporal_cost(2, 2, cfg), std::invalid_argument);
}

TEST(CostTermsTest, PitchImportance) {
  CostConfig cfg;
  EXPECT_NEAR(pitch_importance(Note{0, 72, 1}, 72, 60, cfg), 0.95, kTol);
  EXPECT_NEAR(pitch_importance(Note{0, 60, 1}, 72, 60, cfg), 0.95, kTol);
  EXPECT_NEAR(pitch_importance(Note{0, 66, 1}, 72, 60, cfg), 1.05, kTol);
  EXPECT_NEAR(pitch_importance(Note{0, 69, 1}, 72, 60, cfg), 1.0, kTol);
  EXPECT_EQ(pitch_importance(Note{0, 64, 1}, 64, 64, cfg), 1.0);
}

TEST(CostTermsTest, OnsetImportance) {
  CostConfig cfg;
  const TimeSignature ts{4, 4};
  EXPECT_EQ(onset_importance(Note{4, 60, 1}, ts, 0, cfg), 0.85);
  EXPECT_EQ(onset_importance(Note{1, 60, 1}, ts, 0, cfg), 0.95);
  EXPECT_EQ(onset_importance(Note{Rational(5, 2), 60, 1}, ts, 0, cfg), 1.05);
  EXPECT_EQ(onset_importance(Note{Rational(7, 4), 60, 1}, ts, 0, cfg), 1.15);
  EXPECT_EQ(onset_importance(Note{Rational(1, 3), 60, 1}, ts, 0, cfg), 1.15);
  // With a one-beat pickup, beat 1 is the downbeat and beat 0 is not.
  EXPECT_EQ(onset_importance(Note{1, 60, 1}, ts, 1, cfg), 0.85);
  EXPECT_EQ(onset_importance(Note{0, 60, 1}, ts, 1, cfg), 0.95);
  EXPECT_EQ(onset_importance(Note{3, 60, 1}, TimeSignature{3, 4}, 0, cfg), 0.85);
}

TEST(CostTermsTest, DurationImportance) {
  CostConfig cfg;
  EXPECT_EQ(duration_importance(Note{0, 60, 2}, cfg), 0.85);
  EXPECT_EQ(duration_importance(Note{0, 60, 4}, cfg), 0.85);
  EXPECT_EQ(duration_importance(Note{0, 60, 1}, cfg), 0.95);
  EXPECT_EQ(duration_importance(Note{0, 60, Rational(3, 2)}, cfg), 0.95);
  EXPECT_EQ(duration_importance(Note{0, 60, Rational(1, 2)}, cfg), 1.05);
  EXPECT_EQ(duration_importance(Note{0, 60, Rational(1, 4)}, cfg), 1.15);
  EXPECT_EQ(duration_importance(Note{0, 60, Rational(1, 8)}, cfg), 1.15);
}

TEST(CostTermsTest, HarmonyImportance) {
  CostConfig cfg;
  const ChordEvent c = chord(0, 4, "C");
  EXPECT_EQ(harmony_importance(Note{0, 64, 1}, c, cfg), 0.85);
  EXPECT_EQ(harmony_importance(Note{0, 61, 1}, c, cfg), 1.15);
}

TEST(NoteImportanceTest, ProductOfFactors) {
  CostConfig cfg;
  const ChordEvent c = chord(0, 4, "C");
  ImportanceContext ctx{{48, 72}, {4, 4}, 0, &c};
  NoteImportance best = note_importance(Note{0, 72, 2}, ctx, cfg);
  EXPECT_NEAR(best.total(), 0.58341875, kTol);
  NoteImportance worst = note_importance(Note{Rational(1, 4), 61, Rational(1, 4)}, {{48, 74}, {4, 4}, 0, &c}, cfg);
  EXPECT_NEAR(worst.pitch, 1.05, kTol);
  EXPECT_NEAR(worst.total(), 1.59691875, kTol);
  NoteImportance flat = note_importance(Note{0, 60, 1}, {{60, 60}, {4, 4}, 0, &c}, cfg);
  EXPECT_NEAR(flat.total(), 0.686375, kTol);
  ctx.chord = nullptr;
  EXPECT_THROW(note_importance(Note{0, 60, 1}, ctx, cfg), std::invalid_argument);
}

TEST(BuildGraphTest, WorkedExampleCosts) {
  Phrase p = c_d_c_phrase();
  ReductionGraph g = build_graph(p, detect_anticipations(p), CostConfig{});
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_NEAR(g.importance(1).total(), 0.98598125, kTol);
  EXPECT_NEAR(g.importance(2).total(), 0.72876875, kTol);
  EXPECT_EQ(g.edge(0, 1).category, EdgeCategory::kLinear);
  EXPECT_EQ(g.edge(1, 2).category, EdgeCategory::kLinear);
  EXPECT_EQ(g.edge(0, 2).category, EdgeCategory::kProlongation);
  EXPECT_NEAR(g.edge(0, 1).cost, 1.281775625, kTol);
  EXPECT_NEAR(g.edge(1, 2).cost, 0.947399375, kTol);
  EXPECT_NEAR(g.edge(0, 2).cost, 0.72876875 * (3.0314331330207964 + 0.1), kTol);
  EXPECT_NEAR(g.edge(0, 2).cost, 2.28209, 1e-5);
  EXPECT_THROW(g.edge(2, 1), std::out_of_range);
  EXPECT_THROW(g.edge(0, 3), std::out_of_range);
}

TEST(BuildGraphTest, SingleNoteHasNoEdges) {
  Phrase p = make_phrase({note(0, 60, 4)}, {chord(0, 4, "C")});
  ReductionGraph g = build_graph(p, detect_anticipations(p), CostConfig{});
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraphTest, RandomGraphsAreCompleteAndPositive) {
  std::mt19937_64 rng(3);
  CostConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    Phrase p = testing::random_phrase(rng);
    ChordMembership m = detect_anticipations(p);
    ReductionGraph g = build_graph(p, m, cfg);
    const std::size_t n = p.notes.size();
    ASSERT_EQ(g.edge_count(), n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Edge& e = g.edge(i, j);
        EXPECT_GT(e.cost, 0.0);
        EXPECT_EQ(e.category, classify_edge(p, m, i, j, cfg));
        EXPECT_NEAR(e.cost, g.importance(j).total() * (temporal_cost(i, j, cfg) + cfg.tonal_cost(e.category)),
                    1e-12);
      }
    }
  }
}

TEST(BuildGraphTest, PieceRangeOverride) {
  Phrase p = c_d_c_phrase();
  ReductionGraph g = build_graph(p, detect_anticipations(p), CostConfig{}, PitchRange{48, 72});
  EXPECT_NEAR(g.importance(1).pitch, 0.1 * (0.5 - 2.0 / 12.0) + 1.0, kTol);
}

TEST(CostConfigTest, JsonRoundTripAndValidation) {
  CostConfig cfg;
  cfg.eta = 2.2;
  cfg.D_measures = 3;
  cfg.tonal_costs[2] = 1.75;
  cfg.pitch_range_scope = PitchRangeScope::kPiece;
  EXPECT_EQ(cost_config_from_json(nlohmann::json::parse(cost_config_to_json(cfg).dump())), cfg);
  EXPECT_TRUE(CostConfig{}.validate().empty());

  CostConfig bad;
  bad.eta = -1;
  bad.D_measures = 0;
  EXPECT_EQ(bad.validate().size(), 2u);
  EXPECT_THROW(cost_config_from_json(nlohmann::json{{"bogus", 1}}), std::invalid_argument);
  EXPECT_THROW(cost_config_from_json(nlohmann::json{{"eta", "x"}}), std::invalid_argument);
}

TEST(EdgeCategoryTest, Names) {
  std::set<std::string_view> names;
  for (EdgeCategory c : kAllCategories) {
    names.insert(to_string(c));
    EXPECT_EQ(category_from_string(to_string(c)), c);
  }
  EXPECT_EQ(names, (std::set<std::string_view>{"PE", "LE", "AE", "IPE", "ILE", "UE"}));
  EXPECT_FALSE(category_from_string("XE").has_value());
}

}  // namespace
}  // namespace melred
