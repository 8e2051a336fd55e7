#include "melred/render.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "melred/chords.h"

namespace melred {

std::vector<ReducedNote> as_reduced_notes(const std::vector<Note>& notes) {
  std::vector<ReducedNote> out;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    out.push_back({notes[i].onset, notes[i].pitch, notes[i].duration, false, {i}});
  }
  return out;
}

std::string render_ascii_roll(const std::vector<ReducedNote>& melody, const std::vector<ChordEvent>& chords,
                              const TimeSignature& ts) {
  Rational origin(0), stop(0);
  bool any = false;
  auto extend = [&](const Rational& a, const Rational& b) {
    origin = any ? std::min(origin, a) : a;
    stop = any ? std::max(stop, b) : b;
    any = true;
  };
  for (const ReducedNote& n : melody) extend(n.onset, n.end());
  for (const ChordEvent& c : chords) extend(c.onset, c.end());

  const Rational measure = ts.measure_length();
  std::int64_t measures = std::max<std::int64_t>(1, ceil_int((stop - origin) / measure));
  const std::size_t columns = static_cast<std::size_t>(floor_int(Rational(measures) * measure * 4));
  auto column = [&](const Rational& t) { return floor_int((t - origin) * 4); };

  std::set<int, std::greater<>> pitches;
  for (const ReducedNote& n : melody) pitches.insert(n.pitch);
  std::size_t label_width = 4;
  for (int p : pitches) label_width = std::max(label_width, note_name(p).size() + 1);
  auto label = [&](const std::string& s) { return s + std::string(label_width - s.size(), ' '); };

  std::ostringstream out;
  std::string ruler(columns, '.');
  for (std::size_t c = 0; c < columns; c += 4) {
    const std::int64_t beat = static_cast<std::int64_t>(c / 4) % std::max<std::int64_t>(1, floor_int(measure));
    ruler[c] = static_cast<char>('1' + beat % 9);
  }
  out << label("") << '|' << ruler << "|\n";

  for (int p : pitches) {
    std::string row(columns, '-');
    const ReducedNote* previous = nullptr;
    for (const ReducedNote& n : melody) {
      if (n.pitch != p) continue;
      const std::int64_t a = std::max<std::int64_t>(0, column(n.onset));
      const std::int64_t b = std::min<std::int64_t>(static_cast<std::int64_t>(columns), ceil_int((n.end() - origin) * 4));
      for (std::int64_t c = a; c < b; ++c) row[static_cast<std::size_t>(c)] = '#';
      if (previous != nullptr && previous->end() == n.onset && !previous->tie_to_next && a < b) {
        row[static_cast<std::size_t>(a)] = '+';
      }
      previous = &n;
    }
    out << label(note_name(p)) << '|' << row << "|\n";
  }

  std::string footer(columns, ' ');
  for (std::size_t k = 0; k < chords.size(); ++k) {
    const std::int64_t a = column(chords[k].onset);
    const std::int64_t limit = k + 1 < chords.size() ? column(chords[k + 1].onset) : static_cast<std::int64_t>(columns);
    const std::string name = chords[k].symbol.empty() ? chord_label(chords[k].chroma) : chords[k].symbol;
    for (std::size_t i = 0; i < name.size(); ++i) {
      const std::int64_t c = a + static_cast<std::int64_t>(i);
      if (c >= limit || c >= static_cast<std::int64_t>(columns)) break;
      footer[static_cast<std::size_t>(c)] = name[i];
    }
  }
  out << label("Chd") << '|' << footer << "|\n";
  return out.str();
}

std::vector<ReducedNote> merge_ties(const std::vector<ReducedNote>& notes) {
  std::vector<ReducedNote> out;
  bool extend = false;
  for (const ReducedNote& n : notes) {
    if (extend && !out.empty() && out.back().pitch == n.pitch && out.back().end() == n.onset) {
      ReducedNote& held = out.back();
      held.duration += n.duration;
      held.source_indices.insert(held.source_indices.end(), n.source_indices.begin(), n.source_indices.end());
      held.tie_to_next = n.tie_to_next;
    } else {
      out.push_back(n);
    }
    extend = n.tie_to_next;
  }
  for (ReducedNote& n : out) n.tie_to_next = false;
  return out;
}

namespace {

std::int64_t to_ticks(const Rational& beats) {
  const Rational t = beats * kExportTicksPerQuarter;
  std::int64_t base = floor_int(t);
  return t - base >= Rational(1, 2) ? base + 1 : base;
}

}  // namespace

MidiFile reduction_to_midi(const std::vector<Phrase>& originals, const std::vector<ReducedMelody>& reductions) {
  MidiFile file;
  file.ticks_per_quarter = kExportTicksPerQuarter;
  if (!originals.empty()) file.time_signature = originals.front().time_signature;
  MidiTrack original{"original", {}};
  for (const Phrase& p : originals) {
    for (const Note& n : p.notes) original.notes.push_back({to_ticks(n.onset), to_ticks(n.end()), n.pitch, 80, 0});
  }
  MidiTrack reduced{"reduction", {}};
  for (const ReducedMelody& m : reductions) {
    for (const ReducedNote& n : merge_ties(m.notes)) {
      reduced.notes.push_back({to_ticks(n.onset), to_ticks(n.end()), n.pitch, 80, 1});
    }
  }
  file.tracks = {std::move(original), std::move(reduced)};
  return file;
}

}  // namespace melred
