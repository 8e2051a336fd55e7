#include "melred/baseline_metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "melred/ingest.h"

namespace melred {
namespace {

struct Tally {
  Rational weight;
  Rational total_duration;
  Rational earliest;
  std::vector<std::size_t> sources;
};

struct Span {
  Rational onset;
  Rational end;
  int pitch;
};

Rational overlap(const Rational& a0, const Rational& a1, const Rational& b0, const Rational& b1) {
  Rational lo = std::max(a0, b0);
  Rational hi = std::min(a1, b1);
  return hi > lo ? hi - lo : Rational(0);
}

// Pitch sounding at t; otherwise the most recent one, otherwise the first.
int sample(const std::vector<Span>& spans, const Rational& t) {
  int current = spans.front().pitch;
  for (const Span& s : spans) {
    if (s.onset > t) break;
    current = s.pitch;
  }
  return current;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double chord_tone_fraction(const std::vector<Span>& spans, const std::vector<ChordEvent>& chords) {
  Rational covered, tones;
  for (const Span& s : spans) {
    for (const ChordEvent& c : chords) {
      Rational o = overlap(s.onset, s.end, c.onset, c.end());
      if (o == 0) continue;
      covered += o;
      if (c.contains(pitch_class(s.pitch))) tones += o;
    }
  }
  return covered == 0 ? 0.0 : to_double(tones / covered);
}

}  // namespace

ReducedMelody ds_obs(const Phrase& phrase, const DsObsOptions& options) {
  ReducedMelody out;
  out.phrase_ref = phrase.id;
  const Rational start = phrase.start();
  const Rational end = phrase.end();
  const std::int64_t windows = ceil_int((end - start) / 2);
  for (std::int64_t w = 0; w < windows; ++w) {
    const Rational ws = start + Rational(2 * w);
    const Rational we = std::min(ws + 2, end);
    std::map<int, Tally> tally;
    for (std::size_t i = 0; i < phrase.notes.size(); ++i) {
      const Note& n = phrase.notes[i];
      const Rational o = overlap(n.onset, n.end(), ws, we);
      if (o == 0) continue;
      auto [it, fresh] = tally.try_emplace(n.pitch, Tally{0, 0, n.onset, {}});
      Tally& t = it->second;
      t.weight += options.weighting == ModeWeighting::kDuration ? o : Rational(1);
      t.total_duration += n.duration;
      t.earliest = std::min(t.earliest, n.onset);
      t.sources.push_back(i);
    }

    if (tally.empty()) {
      if (options.empty_window == EmptyWindow::kSustain && !out.notes.empty()) {
        ReducedNote held = out.notes.back();
        out.notes.back().tie_to_next = true;
        held.onset = ws;
        held.duration = we - ws;
        held.tie_to_next = false;
        out.notes.push_back(std::move(held));
      }
      continue;
    }
    auto best = tally.begin();
    for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
      const Tally& a = it->second;
      const Tally& b = best->second;
      if (a.weight != b.weight) {
        if (a.weight > b.weight) best = it;
      } else if (a.total_duration != b.total_duration) {
        if (a.total_duration > b.total_duration) best = it;
      } else if (a.earliest < b.earliest) {
        best = it;
      }
    }
    ReducedNote note;
    note.onset = ws;
    note.pitch = best->first;
    note.duration = we - ws;
    note.source_indices = best->second.sources;
    out.notes.push_back(std::move(note));
  }
  return out;
}

ReducedMelody identity_reduction(const Phrase& phrase) {
  ReducedMelody out;
  out.phrase_ref = phrase.id;
  for (std::size_t i = 0; i < phrase.notes.size(); ++i) {
    const Note& n = phrase.notes[i];
    out.notes.push_back({n.onset, n.pitch, n.duration, false, {i}});
  }
  return out;
}

MetricReport compute_metrics(const Phrase& original, const ReducedMelody& reduced) {
  if (reduced.notes.empty()) throw std::invalid_argument("cannot score an empty reduction");
  if (original.notes.empty()) throw std::invalid_argument("cannot score against an empty phrase");

  std::vector<Span> orig, red;
  for (const Note& n : original.notes) orig.push_back({n.onset, n.end(), n.pitch});
  for (const ReducedNote& n : reduced.notes) red.push_back({n.onset, n.end(), n.pitch});

  MetricReport r;
  r.compression_ratio = static_cast<double>(reduced.notes.size()) / static_cast<double>(original.notes.size());
  r.chord_tone_ratio = chord_tone_fraction(red, original.chords);
  r.chord_tone_ratio_original = chord_tone_fraction(orig, original.chords);

  const ChordMembership membership = detect_anticipations(original);
  std::size_t hits = 0;
  for (const ReducedNote& n : reduced.notes) {
    auto chord = chord_at(original.chords, n.onset);
    if (!chord) continue;
    const ChordEvent& c = original.chords[*chord];
    for (std::size_t i = 0; i < original.notes.size(); ++i) {
      const Note& o = original.notes[i];
      const bool inside = overlap(o.onset, o.end(), c.onset, c.end()) > 0 || membership.chord_index[i] == *chord;
      if (inside && o.pitch == n.pitch) {
        ++hits;
        break;
      }
    }
  }
  r.pitch_recall = static_cast<double>(hits) / static_cast<double>(reduced.notes.size());

  std::vector<double> a, b;
  const Rational start = original.start();
  const std::int64_t beats = ceil_int(original.end() - start);
  for (std::int64_t q = 0; q < beats; ++q) {
    const Rational t = start + q;
    a.push_back(sample(orig, t));
    b.push_back(sample(red, t));
  }
  r.contour_correlation = pearson(a, b);
  return r;
}

nlohmann::ordered_json metric_report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["compression_ratio"] = report.compression_ratio;
  j["chord_tone_ratio"] = report.chord_tone_ratio;
  j["chord_tone_ratio_original"] = report.chord_tone_ratio_original;
  j["contour_correlation"] =
      report.contour_correlation ? nlohmann::ordered_json(*report.contour_correlation) : nlohmann::ordered_json();
  j["pitch_recall"] = report.pitch_recall;
  return j;
}

namespace {

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

Stat stat(const std::vector<double>& v) {
  Stat s;
  s.n = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

constexpr const char* kMetricNames[] = {"compression", "chord_tone", "chord_tone_orig", "pitch_recall",
                                        "contour_corr"};

std::vector<std::optional<double>> values(const MetricReport& r) {
  return {r.compression_ratio, r.chord_tone_ratio, r.chord_tone_ratio_original, r.pitch_recall,
          r.contour_correlation};
}

// Per-method, per-metric statistics in first-seen method order.
std::vector<std::pair<std::string, std::vector<Stat>>> summarize(const std::vector<MetricRow>& rows) {
  std::vector<std::pair<std::string, std::vector<std::vector<double>>>> acc;
  for (const MetricRow& row : rows) {
    auto it = std::find_if(acc.begin(), acc.end(), [&](const auto& e) { return e.first == row.method; });
    if (it == acc.end()) {
      acc.emplace_back(row.method, std::vector<std::vector<double>>(5));
      it = std::prev(acc.end());
    }
    auto v = values(row.report);
    for (std::size_t m = 0; m < v.size(); ++m) {
      if (v[m]) it->second[m].push_back(*v[m]);
    }
  }
  std::vector<std::pair<std::string, std::vector<Stat>>> out;
  for (auto& [method, cols] : acc) {
    std::vector<Stat> stats;
    for (const auto& c : cols) stats.push_back(stat(c));
    out.emplace_back(method, std::move(stats));
  }
  return out;
}

std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

}  // namespace

std::string format_metric_table(const std::vector<MetricRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"phrase", "method"});
  for (const char* name : kMetricNames) cells.back().push_back(name);
  for (const MetricRow& row : rows) {
    std::vector<std::string> line{row.phrase, row.method};
    for (const auto& v : values(row.report)) line.push_back(v ? fixed(*v) : "n/a");
    cells.push_back(std::move(line));
  }
  const std::size_t body_end = cells.size();
  for (const auto& [method, stats] : summarize(rows)) {
    std::vector<std::string> line{"mean±std", method};
    for (const Stat& s : stats) line.push_back(s.n == 0 ? "n/a" : fixed(s.mean, 3) + "±" + fixed(s.std, 3));
    cells.push_back(std::move(line));
  }

  std::vector<std::size_t> width(cells.front().size(), 0);
  // "±" is two bytes but one column.
  auto display = [](const std::string& s) { return s.size() - (s.find("±") != std::string::npos ? 1 : 0); };
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], display(line[c]));
  }
  std::ostringstream out;
  out << "# objective proxy metrics (not perceptual scores)\n";
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (r == 1 || (r == body_end && body_end < cells.size())) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const std::string& s = cells[r][c];
      const std::size_t pad = width[c] - display(s);
      if (c < 2) {
        out << s << std::string(pad, ' ');
      } else {
        out << std::string(pad, ' ') << s;
      }
      out << (c + 1 < cells[r].size() ? "  " : "\n");
    }
  }
  return out.str();
}

nlohmann::ordered_json metric_rows_to_json(const std::vector<MetricRow>& rows) {
  nlohmann::ordered_json j;
  j["kind"] = "objective-proxy";
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const MetricRow& row : rows) {
    list.push_back({{"phrase", row.phrase}, {"method", row.method}, {"metrics", metric_report_to_json(row.report)}});
  }
  j["rows"] = list;
  nlohmann::ordered_json summary;
  for (const auto& [method, stats] : summarize(rows)) {
    nlohmann::ordered_json m;
    for (std::size_t k = 0; k < stats.size(); ++k) {
      m[kMetricNames[k]] = {{"mean", stats[k].mean}, {"std", stats[k].std}, {"n", stats[k].n}};
    }
    summary[method] = m;
  }
  j["summary"] = summary;
  return j;
}

}  // namespace melred
