// Python bindings for the reduction pipeline. Beat values cross the boundary
// as fractions.Fraction.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "melred/baseline_metrics.h"
#include "melred/chords.h"
#include "melred/ingest.h"
#include "melred/path_solver.h"
#include "melred/postprocess.h"
#include "melred/reduction_graph.h"
#include "melred/render.h"

namespace py = pybind11;

namespace pybind11::detail {

template <>
struct type_caster<melred::Rational> {
  PYBIND11_TYPE_CASTER(melred::Rational, const_name("fractions.Fraction"));

  bool load(handle src, bool) {
    if (!src) return false;
    object value = reinterpret_borrow<object>(src);
    if (PyFloat_Check(src.ptr())) value = module_::import("fractions").attr("Fraction")(value);
    if (!hasattr(value, "numerator") || !hasattr(value, "denominator")) return false;
    try {
      this->value = melred::Rational(value.attr("numerator").cast<std::int64_t>(),
                                     value.attr("denominator").cast<std::int64_t>());
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }

  static handle cast(const melred::Rational& r, return_value_policy, handle) {
    return module_::import("fractions").attr("Fraction")(r.numerator(), r.denominator()).release();
  }
};

}  // namespace pybind11::detail

namespace {

std::vector<int> chroma_list(const melred::Chroma& c) {
  std::vector<int> out(12);
  for (std::size_t k = 0; k < 12; ++k) out[k] = c.test(k) ? 1 : 0;
  return out;
}

melred::Chroma chroma_from_list(const std::vector<int>& bits) {
  if (bits.size() != 12) throw py::value_error("chroma needs 12 entries");
  melred::Chroma c;
  for (std::size_t k = 0; k < 12; ++k) c.set(k, bits[k] != 0);
  return c;
}

}  // namespace

PYBIND11_MODULE(_melred, m) {
  using namespace melred;
  m.doc() = "Graph-based melody reduction";

  py::register_exception<IngestError>(m, "IngestError", PyExc_ValueError);

  py::class_<Note>(m, "Note")
      .def(py::init([](Rational onset, int pitch, Rational duration) { return Note{onset, pitch, duration}; }),
           py::arg("onset"), py::arg("pitch"), py::arg("duration"))
      .def_readwrite("onset", &Note::onset)
      .def_readwrite("pitch", &Note::pitch)
      .def_readwrite("duration", &Note::duration)
      .def(py::self == py::self)
      .def("__repr__", [](const Note& n) {
        return "Note(onset=" + to_string(n.onset) + ", pitch=" + std::to_string(n.pitch) +
               ", duration=" + to_string(n.duration) + ")";
      });

  py::class_<ChordEvent>(m, "ChordEvent")
      .def(py::init([](Rational onset, Rational duration, const std::vector<int>& chroma, std::string symbol) {
             return ChordEvent{onset, duration, chroma_from_list(chroma), std::move(symbol)};
           }),
           py::arg("onset"), py::arg("duration"), py::arg("chroma"), py::arg("symbol") = "")
      .def_readwrite("onset", &ChordEvent::onset)
      .def_readwrite("duration", &ChordEvent::duration)
      .def_property(
          "chroma", [](const ChordEvent& c) { return chroma_list(c.chroma); },
          [](ChordEvent& c, const std::vector<int>& bits) { c.chroma = chroma_from_list(bits); })
      .def_readwrite("symbol", &ChordEvent::symbol);

  m.def(
      "chroma_from_symbol",
      [](const std::string& symbol) {
        auto c = chroma_from_symbol(symbol);
        if (!c) throw py::value_error("unknown chord symbol '" + symbol + "'");
        return chroma_list(*c);
      },
      py::arg("symbol"));

  py::class_<TimeSignature>(m, "TimeSignature")
      .def(py::init([](int num, int den) { return TimeSignature{num, den}; }), py::arg("numerator") = 4,
           py::arg("denominator") = 4)
      .def_readwrite("numerator", &TimeSignature::numerator)
      .def_readwrite("denominator", &TimeSignature::denominator)
      .def("measure_length", &TimeSignature::measure_length);

  py::class_<Phrase>(m, "Phrase")
      .def(py::init<>())
      .def_readwrite("id", &Phrase::id)
      .def_readwrite("notes", &Phrase::notes)
      .def_readwrite("chords", &Phrase::chords)
      .def_readwrite("time_signature", &Phrase::time_signature)
      .def_readwrite("anacrusis", &Phrase::anacrusis)
      .def(py::self == py::self);

  py::class_<ChordMembership>(m, "ChordMembership")
      .def_readonly("chord_index", &ChordMembership::chord_index)
      .def_readonly("anticipation", &ChordMembership::anticipation);

  py::class_<ReducedNote>(m, "ReducedNote")
      .def_readonly("onset", &ReducedNote::onset)
      .def_readonly("pitch", &ReducedNote::pitch)
      .def_readonly("duration", &ReducedNote::duration)
      .def_readonly("tie_to_next", &ReducedNote::tie_to_next)
      .def_readonly("source_indices", &ReducedNote::source_indices);

  py::class_<ReducedMelody>(m, "ReducedMelody")
      .def_readonly("notes", &ReducedMelody::notes)
      .def_readonly("phrase_ref", &ReducedMelody::phrase_ref)
      .def(py::self == py::self);

  py::enum_<EdgeCategory>(m, "EdgeCategory")
      .value("PE", EdgeCategory::kProlongation)
      .value("LE", EdgeCategory::kLinear)
      .value("AE", EdgeCategory::kArpeggiation)
      .value("IPE", EdgeCategory::kImaginaryProlongation)
      .value("ILE", EdgeCategory::kImaginaryLinear)
      .value("UE", EdgeCategory::kUnclassified);

  py::class_<CostConfig>(m, "CostConfig")
      .def(py::init<>())
      .def_readwrite("tonal_costs", &CostConfig::tonal_costs)
      .def_readwrite("eta", &CostConfig::eta)
      .def_readwrite("D_measures", &CostConfig::D_measures)
      .def_readwrite("pitch_weight_span", &CostConfig::pitch_weight_span)
      .def_readwrite("onset_factors", &CostConfig::onset_factors)
      .def_readwrite("duration_factors", &CostConfig::duration_factors)
      .def_readwrite("harmony_factors", &CostConfig::harmony_factors)
      .def("tonal_cost", &CostConfig::tonal_cost);

  py::class_<Edge>(m, "Edge").def_readonly("category", &Edge::category).def_readonly("cost", &Edge::cost);

  py::class_<NoteImportance>(m, "NoteImportance")
      .def_readonly("pitch", &NoteImportance::pitch)
      .def_readonly("onset", &NoteImportance::onset)
      .def_readonly("duration", &NoteImportance::duration)
      .def_readonly("harmony", &NoteImportance::harmony)
      .def("total", &NoteImportance::total);

  py::class_<ReductionGraph>(m, "ReductionGraph")
      .def("node_count", &ReductionGraph::node_count)
      .def("edge", &ReductionGraph::edge, py::arg("i"), py::arg("j"))
      .def("importance", &ReductionGraph::importance, py::arg("i"));

  py::class_<ReductionPath>(m, "ReductionPath")
      .def_readonly("nodes", &ReductionPath::nodes)
      .def_readonly("total_cost", &ReductionPath::total_cost)
      .def_readonly("categories", &ReductionPath::categories);

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("compression_ratio", &MetricReport::compression_ratio)
      .def_readonly("chord_tone_ratio", &MetricReport::chord_tone_ratio)
      .def_readonly("chord_tone_ratio_original", &MetricReport::chord_tone_ratio_original)
      .def_readonly("contour_correlation", &MetricReport::contour_correlation)
      .def_readonly("pitch_recall", &MetricReport::pitch_recall);

  m.def("pitch_class", &pitch_class, py::arg("pitch"));
  m.def("validate_phrase", [](const Phrase& p) {
    std::vector<std::pair<std::size_t, std::string>> out;
    for (const Violation& v : validate_phrase(p)) out.emplace_back(v.index, v.rule);
    return out;
  });
  m.def("parse_leadsheet", &parse_leadsheet, py::arg("text"));
  m.def("serialize_phrase", &serialize_phrase, py::arg("phrase"), py::arg("grid") = 4);
  m.def(
      "import_midi",
      [](const py::bytes& midi, const std::string& chord_csv, int grid, std::optional<std::size_t> track) {
        const std::string data = midi;
        MidiImportOptions options;
        options.track = track;
        return import_midi(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()),
                           chord_csv, QuantizationConfig{grid}, options);
      },
      py::arg("midi"), py::arg("chord_csv"), py::arg("grid") = 4, py::arg("track") = py::none());
  m.def(
      "detect_anticipations",
      [](const Phrase& p, Rational window) { return detect_anticipations(p, AnticipationConfig{window}); },
      py::arg("phrase"), py::arg("window") = Rational(1, 2));
  m.def(
      "classify_edge",
      [](const Note& a, const Note& b, bool same_chord, Rational threshold) {
        return classify_edge(a, b, same_chord, threshold);
      },
      py::arg("from_note"), py::arg("to_note"), py::arg("same_chord"), py::arg("threshold") = Rational(8));
  m.def("temporal_cost", &temporal_cost, py::arg("i"), py::arg("j"), py::arg("cfg") = CostConfig{});
  m.def(
      "build_graph",
      [](const Phrase& p, const CostConfig& cfg) { return build_graph(p, detect_anticipations(p), cfg); },
      py::arg("phrase"), py::arg("cfg") = CostConfig{});
  m.def("shortest_path", &shortest_path, py::arg("graph"));
  m.def("k_shortest_paths", &k_shortest_paths, py::arg("graph"), py::arg("k"));
  m.def("brute_force_shortest", &brute_force_shortest, py::arg("graph"));
  m.def(
      "reduce_phrase",
      [](const Phrase& p, const CostConfig& cfg, std::uint64_t seed, bool protect_endpoints) {
        return reduce_phrase(p, cfg, OmissionPolicy{seed, protect_endpoints});
      },
      py::arg("phrase"), py::arg("cfg") = CostConfig{}, py::arg("seed") = 0, py::arg("protect_endpoints") = true);
  m.def(
      "ds_obs",
      [](const Phrase& p, bool count_mode, bool rest_windows) {
        DsObsOptions o;
        if (count_mode) o.weighting = ModeWeighting::kCount;
        if (rest_windows) o.empty_window = EmptyWindow::kRest;
        return ds_obs(p, o);
      },
      py::arg("phrase"), py::arg("count_mode") = false, py::arg("rest_windows") = false);
  m.def("compute_metrics", &compute_metrics, py::arg("original"), py::arg("reduced"));
  m.def(
      "render_ascii_roll",
      [](const ReducedMelody& melody, const Phrase& phrase) {
        return render_ascii_roll(melody.notes, phrase.chords, phrase.time_signature);
      },
      py::arg("melody"), py::arg("phrase"));
}
