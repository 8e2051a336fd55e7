#include <cmath>
#include <sstream>

#include "json.hpp"

#include "melred/chords.h"
#include "melred/ingest.h"

namespace melred {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw IngestError(IngestErrorKind::kSchema, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema(where, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  schema(where, "expected an integer");
}

Rational as_rational(const json& v, const std::string& where) {
  if (v.is_array()) {
    if (v.size() != 2) schema(where, "rational must be a [numerator, denominator] pair");
    std::int64_t den = as_int(v[1], where + "/1");
    if (den <= 0) schema(where, "denominator must be positive");
    return Rational(as_int(v[0], where + "/0"), den);
  }
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) {
    // Accept binary fractions down to 1/64, which floats represent exactly.
    double scaled = v.get<double>() * 64.0;
    if (std::isfinite(scaled) && scaled == std::floor(scaled)) {
      return Rational(static_cast<std::int64_t>(scaled), 64);
    }
    schema(where, "number is not a multiple of 1/64; use a [num, den] pair");
  }
  schema(where, "expected a rational ([num, den] or integer)");
}

ordered_json rational_json(const Rational& r) { return ordered_json::array({r.numerator(), r.denominator()}); }

ChordEvent parse_chord(const json& obj, const std::string& where) {
  ChordEvent c;
  c.onset = as_rational(require(obj, "onset", where), where + "/onset");
  c.duration = as_rational(require(obj, "duration", where), where + "/duration");
  const bool has_symbol = obj.contains("symbol");
  const bool has_chroma = obj.contains("chroma");
  if (!has_symbol && !has_chroma) schema(where, "chord needs 'symbol' or 'chroma'");
  if (has_symbol) {
    if (!obj["symbol"].is_string()) schema(where + "/symbol", "expected a string");
    c.symbol = obj["symbol"].get<std::string>();
  }
  if (has_chroma) {
    const json& bits = obj["chroma"];
    if (!bits.is_array() || bits.size() != 12) schema(where + "/chroma", "expected 12 integers");
    for (std::size_t k = 0; k < 12; ++k) {
      std::int64_t b = as_int(bits[k], where + "/chroma/" + std::to_string(k));
      if (b != 0 && b != 1) schema(where + "/chroma/" + std::to_string(k), "chroma entries must be 0 or 1");
      c.chroma.set(k, b == 1);
    }
  } else {
    auto chroma = chroma_from_symbol(c.symbol);
    if (!chroma) {
      throw IngestError(IngestErrorKind::kChordSymbol, where + ": cannot resolve chord symbol '" + c.symbol + "'");
    }
    c.chroma = *chroma;
  }
  if (c.chroma.none()) {
    throw IngestError(IngestErrorKind::kChordSymbol, where + ": chord has an empty chroma");
  }
  return c;
}

ordered_json meta_json(const std::string& title, const Phrase& p, int grid) {
  ordered_json meta;
  meta["title"] = title;
  meta["time_signature"] = {p.time_signature.numerator, p.time_signature.denominator};
  meta["anacrusis_beats"] = rational_json(p.anacrusis);
  meta["grid"] = grid;
  return meta;
}

ordered_json chords_json(const std::vector<ChordEvent>& chords) {
  ordered_json out = ordered_json::array();
  for (const ChordEvent& c : chords) {
    ordered_json j;
    j["onset"] = rational_json(c.onset);
    j["duration"] = rational_json(c.duration);
    auto resolved = chroma_from_symbol(c.symbol);
    if (!c.symbol.empty()) j["symbol"] = c.symbol;
    if (!resolved || *resolved != c.chroma) {
      ordered_json bits = ordered_json::array();
      for (std::size_t k = 0; k < 12; ++k) bits.push_back(c.chroma.test(k) ? 1 : 0);
      j["chroma"] = bits;
    }
    out.push_back(j);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<Phrase> parse_leadsheet(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IngestError(IngestErrorKind::kSchema, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) schema("/", "document must be a JSON object");

  std::string title = "phrase";
  TimeSignature ts;
  Rational anacrusis;
  QuantizationConfig quant;
  if (auto it = doc.find("meta"); it != doc.end()) {
    const json& meta = *it;
    if (!meta.is_object()) schema("/meta", "expected an object");
    if (auto t = meta.find("title"); t != meta.end()) {
      if (!t->is_string()) schema("/meta/title", "expected a string");
      title = t->get<std::string>();
    }
    if (auto t = meta.find("time_signature"); t != meta.end()) {
      if (!t->is_array() || t->size() != 2) schema("/meta/time_signature", "expected [numerator, denominator]");
      ts.numerator = static_cast<int>(as_int((*t)[0], "/meta/time_signature/0"));
      ts.denominator = static_cast<int>(as_int((*t)[1], "/meta/time_signature/1"));
      bool pow2 = ts.denominator > 0 && (ts.denominator & (ts.denominator - 1)) == 0;
      if (ts.numerator <= 0 || !pow2) schema("/meta/time_signature", "invalid time signature");
    }
    if (auto t = meta.find("anacrusis_beats"); t != meta.end()) {
      anacrusis = as_rational(*t, "/meta/anacrusis_beats");
      if (anacrusis < 0) schema("/meta/anacrusis_beats", "must be non-negative");
    }
    if (auto t = meta.find("grid"); t != meta.end()) {
      quant.grid = static_cast<int>(as_int(*t, "/meta/grid"));
      if (quant.grid != 1 && quant.grid != 2 && quant.grid != 4) schema("/meta/grid", "grid must be 1, 2 or 4");
    }
  }

  const json& notes_json = require(doc, "notes", "/");
  if (!notes_json.is_array()) schema("/notes", "expected an array");
  std::vector<SourceNote> notes;
  for (std::size_t i = 0; i < notes_json.size(); ++i) {
    const std::string where = "/notes/" + std::to_string(i);
    const json& n = notes_json[i];
    Note note;
    note.onset = as_rational(require(n, "onset", where), where + "/onset");
    note.pitch = static_cast<int>(as_int(require(n, "pitch", where), where + "/pitch"));
    note.duration = as_rational(require(n, "duration", where), where + "/duration");
    if (note.onset < 0) schema(where + "/onset", "must be non-negative");
    if (note.pitch < 0 || note.pitch > 127) schema(where + "/pitch", "must be within 0..127");
    if (note.duration <= 0) schema(where + "/duration", "must be positive");
    notes.push_back({snap_note(note, quant), i});
  }

  const json& chords_in = require(doc, "chords", "/");
  if (!chords_in.is_array()) schema("/chords", "expected an array");
  std::vector<ChordEvent> chords;
  for (std::size_t k = 0; k < chords_in.size(); ++k) {
    chords.push_back(parse_chord(chords_in[k], "/chords/" + std::to_string(k)));
  }

  std::vector<PhraseSpan> spans;
  if (auto it = doc.find("phrases"); it != doc.end()) {
    if (!it->is_array()) schema("/phrases", "expected an array of [start, end] pairs");
    for (std::size_t s = 0; s < it->size(); ++s) {
      const std::string where = "/phrases/" + std::to_string(s);
      const json& span = (*it)[s];
      if (!span.is_array() || span.size() != 2) schema(where, "expected [start, end]");
      spans.emplace_back(as_rational(span[0], where + "/0"), as_rational(span[1], where + "/1"));
    }
  }
  return assemble_phrases(title, std::move(notes), std::move(chords), ts, anacrusis, spans);
}

std::string serialize_phrase(const Phrase& phrase, int grid) {
  ordered_json doc;
  doc["meta"] = meta_json(phrase.id, phrase, grid);
  ordered_json notes = ordered_json::array();
  for (const Note& n : phrase.notes) {
    ordered_json j;
    j["onset"] = rational_json(n.onset);
    j["pitch"] = n.pitch;
    j["duration"] = rational_json(n.duration);
    notes.push_back(j);
  }
  doc["notes"] = notes;
  doc["chords"] = chords_json(phrase.chords);
  return doc.dump(2) + "\n";
}

std::string serialize_reduction(const ReducedMelody& melody, const Phrase& source, int grid) {
  ordered_json doc;
  doc["meta"] = meta_json(melody.phrase_ref, source, grid);
  ordered_json notes = ordered_json::array();
  for (const ReducedNote& n : melody.notes) {
    ordered_json j;
    j["onset"] = rational_json(n.onset);
    j["pitch"] = n.pitch;
    j["duration"] = rational_json(n.duration);
    j["tie_to_next"] = n.tie_to_next;
    j["sources"] = n.source_indices;
    notes.push_back(j);
  }
  doc["notes"] = notes;
  doc["chords"] = chords_json(source.chords);
  return doc.dump(2) + "\n";
}

std::vector<ChordEvent> parse_chord_csv(std::string_view text) {
  std::vector<ChordEvent> chords;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    // '#' opens a comment at the start of a line or after whitespace; inside a
    // field it is a sharp (F#m7).
    for (std::size_t hash = line.find('#'); hash != std::string_view::npos; hash = line.find('#', hash + 1)) {
      if (hash == 0 || line[hash - 1] == ' ' || line[hash - 1] == '\t') {
        line = line.substr(0, hash);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const bool first = !seen_row;
    seen_row = true;
    auto fail = [&](const std::string& why) -> IngestError {
      return IngestError(IngestErrorKind::kSidecar, "line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 3) throw fail("expected 3 fields, found " + std::to_string(fields.size()));

    ChordEvent c;
    try {
      c.onset = parse_rational(fields[0]);
      c.duration = parse_rational(fields[1]);
    } catch (const std::invalid_argument& e) {
      if (first) continue;  // header row
      throw fail(e.what());
    }
    if (c.onset < 0 || c.duration <= 0) throw fail("onset must be >= 0 and duration > 0");
    if (auto bits = chroma_from_bits(fields[2])) {
      c.chroma = *bits;
    } else if (auto sym = chroma_from_symbol(fields[2])) {
      c.chroma = *sym;
      c.symbol = std::string(fields[2]);
    } else {
      throw fail("unrecognized chord '" + std::string(fields[2]) + "'");
    }
    if (c.chroma.none()) throw fail("empty chroma");
    chords.push_back(std::move(c));
  }
  return chords;
}

std::string write_chord_csv(const std::vector<ChordEvent>& chords) {
  std::ostringstream out;
  out << "onset_beat,duration_beats,symbol_or_chroma\n";
  for (const ChordEvent& c : chords) {
    auto resolved = chroma_from_symbol(c.symbol);
    out << to_string(c.onset) << ',' << to_string(c.duration) << ','
        << (resolved && *resolved == c.chroma ? c.symbol : chroma_to_bits(c.chroma)) << '\n';
  }
  return out.str();
}

}  // namespace melred
