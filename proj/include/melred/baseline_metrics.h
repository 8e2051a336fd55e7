// Downsampling baseline and objective comparison metrics.
//
// None of these metrics come with a reference definition; they are proxies
// for faithfulness and harmonic fit, and every output labels them that way.

#ifndef MELRED_BASELINE_METRICS_H_
#define MELRED_BASELINE_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "melred/model.h"

namespace melred {

enum class ModeWeighting { kDuration, kCount };
enum class EmptyWindow { kSustain, kRest };

struct DsObsOptions {
  ModeWeighting weighting = ModeWeighting::kDuration;
  EmptyWindow empty_window = EmptyWindow::kSustain;
};

/// One half note per 2-beat window from the start of the chord timeline,
/// pitched at the window's most common pitch. Duration mode weighs pitches by
/// time sounding inside the window; count mode by number of sounding notes.
/// Ties go to the longer total note duration, then the earlier onset. The last
/// window is cut at the phrase end.
ReducedMelody ds_obs(const Phrase& phrase, const DsObsOptions& options = {});

/// The original notes as a reduction of themselves.
ReducedMelody identity_reduction(const Phrase& phrase);

struct MetricReport {
  double compression_ratio = 0.0;
  double chord_tone_ratio = 0.0;
  double chord_tone_ratio_original = 0.0;
  // Absent when either pitch curve is constant.
  std::optional<double> contour_correlation;
  double pitch_recall = 0.0;
};

/// Throws std::invalid_argument for an empty reduction.
MetricReport compute_metrics(const Phrase& original, const ReducedMelody& reduced);

nlohmann::ordered_json metric_report_to_json(const MetricReport& report);

struct MetricRow {
  std::string phrase;
  std::string method;
  MetricReport report;
};

/// Aligned text table of rows followed by a per-method mean ± std summary.
std::string format_metric_table(const std::vector<MetricRow>& rows);

/// {"kind": "objective-proxy", "rows": [...], "summary": {...}}
nlohmann::ordered_json metric_rows_to_json(const std::vector<MetricRow>& rows);

}  // namespace melred

#endif  // MELRED_BASELINE_METRICS_H_
