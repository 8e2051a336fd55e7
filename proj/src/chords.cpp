#include "melred/chords.h"

#include <array>
#include <initializer_list>
#include <utility>

namespace melred {
namespace {

struct Quality {
  std::string_view name;
  std::initializer_list<int> intervals;
};

// Order matters for chord_label: the first matching spelling wins.
const std::array<Quality, 12> kQualities = {{
    {"", {0, 4, 7}},
    {"m", {0, 3, 7}},
    {"7", {0, 4, 7, 10}},
    {"maj7", {0, 4, 7, 11}},
    {"m7", {0, 3, 7, 10}},
    {"dim", {0, 3, 6}},
    {"aug", {0, 4, 8}},
    {"sus4", {0, 5, 7}},
    {"sus2", {0, 2, 7}},
    {"maj", {0, 4, 7}},
    {"min", {0, 3, 7}},
    {"min7", {0, 3, 7, 10}},
}};

constexpr std::array<std::string_view, 12> kRootNames = {"C",  "C#", "D",  "Eb", "E",  "F",
                                                         "F#", "G",  "Ab", "A",  "Bb", "B"};

std::optional<int> root_pitch_class(char letter) {
  switch (letter) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
    default: return std::nullopt;
  }
}

Chroma build(int root, std::initializer_list<int> intervals) {
  Chroma c;
  for (int iv : intervals) c.set(static_cast<std::size_t>(pitch_class(root + iv)));
  return c;
}

}  // namespace

std::optional<Chroma> chroma_from_symbol(std::string_view symbol) {
  if (symbol.empty()) return std::nullopt;
  auto root = root_pitch_class(symbol.front());
  if (!root) return std::nullopt;
  symbol.remove_prefix(1);
  if (!symbol.empty() && symbol.front() == '#') {
    ++*root;
    symbol.remove_prefix(1);
  } else if (!symbol.empty() && symbol.front() == 'b') {
    --*root;
    symbol.remove_prefix(1);
  }
  if (!symbol.empty() && symbol.front() == ':') symbol.remove_prefix(1);
  for (const Quality& q : kQualities) {
    if (q.name == symbol) return build(*root, q.intervals);
  }
  return std::nullopt;
}

std::optional<Chroma> chroma_from_bits(std::string_view bits) {
  if (bits.size() != 12) return std::nullopt;
  Chroma c;
  for (std::size_t i = 0; i < 12; ++i) {
    if (bits[i] == '1') {
      c.set(i);
    } else if (bits[i] != '0') {
      return std::nullopt;
    }
  }
  return c;
}

std::string chroma_to_bits(const Chroma& chroma) {
  std::string s(12, '0');
  for (std::size_t i = 0; i < 12; ++i) {
    if (chroma.test(i)) s[i] = '1';
  }
  return s;
}

std::string chord_label(const Chroma& chroma) {
  for (const Quality& q : kQualities) {
    for (int root = 0; root < 12; ++root) {
      if (build(root, q.intervals) == chroma) {
        return std::string(kRootNames[static_cast<std::size_t>(root)]) + std::string(q.name);
      }
    }
  }
  return chroma_to_bits(chroma);
}

}  // namespace melred
