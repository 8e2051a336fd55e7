#include "melred/midi.h"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>
#include <utility>

#include "melred/ingest.h"

namespace melred {
namespace {

[[noreturn]] void fail(const std::string& message) { throw IngestError(IngestErrorKind::kMidi, message); }

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t base = 0) : bytes_(bytes), base_(base) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t offset() const { return base_ + pos_; }

  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) fail("unexpected end of data at byte " + std::to_string(offset()));
    return bytes_[pos_++];
  }
  std::uint8_t peek() const {
    if (pos_ >= bytes_.size()) fail("unexpected end of data at byte " + std::to_string(offset()));
    return bytes_[pos_];
  }
  std::uint32_t be(int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t vlq() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    fail("variable-length quantity longer than 4 bytes at byte " + std::to_string(offset()));
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail("chunk overruns file at byte " + std::to_string(offset()));
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t base_ = 0;
  std::size_t pos_ = 0;
};

MidiTrack read_track(std::span<const std::uint8_t> data, std::size_t base, std::optional<TimeSignature>& ts) {
  MidiTrack track;
  Reader r(data, base);
  std::int64_t tick = 0;
  std::uint8_t running = 0;
  // FIFO per (channel, pitch) so repeated note-ons pair with offs in order.
  std::map<std::pair<int, int>, std::deque<std::pair<std::int64_t, int>>> open;

  auto close = [&](int channel, int pitch) {
    auto it = open.find({channel, pitch});
    if (it == open.end() || it->second.empty()) return;
    auto [start, velocity] = it->second.front();
    it->second.pop_front();
    track.notes.push_back({start, tick, pitch, velocity, channel});
  };

  while (!r.done()) {
    tick += r.vlq();
    std::uint8_t status = r.peek();
    if (status & 0x80) {
      r.u8();
    } else {
      if (running == 0) fail("data byte without running status at byte " + std::to_string(r.offset()));
      status = running;
    }

    if (status == 0xFF) {
      std::uint8_t type = r.u8();
      auto payload = r.take(r.vlq());
      if (type == 0x03) {
        track.name.assign(payload.begin(), payload.end());
      } else if (type == 0x58 && payload.size() >= 2 && !ts) {
        ts = TimeSignature{payload[0], 1 << payload[1]};
      } else if (type == 0x2F) {
        break;
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      r.take(r.vlq());
      continue;
    }
    if (status >= 0xF0) fail("unsupported system message at byte " + std::to_string(r.offset()));

    running = status;
    const int kind = status >> 4;
    const int channel = status & 0x0F;
    if (kind == 0xC || kind == 0xD) {
      r.u8();
      continue;
    }
    const int a = r.u8() & 0x7F;
    const int b = r.u8() & 0x7F;
    if (kind == 0x9 && b > 0) {
      open[{channel, a}].emplace_back(tick, b);
    } else if (kind == 0x8 || kind == 0x9) {
      close(channel, a);
    }
  }
  for (auto& [key, starts] : open) {
    for (auto [start, velocity] : starts) track.notes.push_back({start, tick, key.second, velocity, key.first});
  }
  std::sort(track.notes.begin(), track.notes.end(), [](const MidiNote& x, const MidiNote& y) {
    return std::tie(x.start_tick, x.pitch, x.end_tick) < std::tie(y.start_tick, y.pitch, y.end_tick);
  });
  return track;
}

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int n) {
  for (int i = n - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_vlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = v & 0x7F;
  while ((v >>= 7) != 0) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

void put_chunk(std::vector<std::uint8_t>& out, const char* tag, const std::vector<std::uint8_t>& body) {
  out.insert(out.end(), tag, tag + 4);
  put_be(out, static_cast<std::uint32_t>(body.size()), 4);
  out.insert(out.end(), body.begin(), body.end());
}

int log2_exact(int v) {
  int n = 0;
  while ((1 << n) < v) ++n;
  return n;
}

}  // namespace

MidiFile read_midi(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto tag = r.take(4);
  if (!std::equal(tag.begin(), tag.end(), "MThd")) fail("missing MThd header");
  std::uint32_t header_len = r.be(4);
  if (header_len < 6) fail("MThd chunk too short");
  MidiFile file;
  file.format = static_cast<int>(r.be(2));
  const std::uint32_t track_count = r.be(2);
  const std::uint32_t division = r.be(2);
  r.take(header_len - 6);
  if (file.format > 1) fail("format " + std::to_string(file.format) + " is not supported");
  if (division & 0x8000) fail("SMPTE time division is not supported");
  if (division == 0) fail("zero ticks per quarter");
  file.ticks_per_quarter = static_cast<int>(division);

  while (!r.done() && file.tracks.size() < track_count) {
    auto chunk_tag = r.take(4);
    std::uint32_t len = r.be(4);
    std::size_t base = r.offset();
    auto body = r.take(len);
    if (std::equal(chunk_tag.begin(), chunk_tag.end(), "MTrk")) {
      file.tracks.push_back(read_track(body, base, file.time_signature));
    }
  }
  if (file.tracks.size() != track_count) {
    fail("header declares " + std::to_string(track_count) + " tracks, found " + std::to_string(file.tracks.size()));
  }
  return file;
}

std::vector<std::uint8_t> write_midi(const MidiFile& file) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> header;
  put_be(header, 1, 2);
  put_be(header, static_cast<std::uint32_t>(file.tracks.size() + 1), 2);
  put_be(header, static_cast<std::uint32_t>(file.ticks_per_quarter), 2);
  put_chunk(out, "MThd", header);

  const TimeSignature ts = file.time_signature.value_or(TimeSignature{});
  std::vector<std::uint8_t> conductor = {0x00, 0xFF, 0x58, 0x04,
                                         static_cast<std::uint8_t>(ts.numerator),
                                         static_cast<std::uint8_t>(log2_exact(ts.denominator)),
                                         0x18, 0x08,
                                         0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20,
                                         0x00, 0xFF, 0x2F, 0x00};
  put_chunk(out, "MTrk", conductor);

  for (const MidiTrack& track : file.tracks) {
    std::vector<std::uint8_t> body;
    if (!track.name.empty()) {
      body.insert(body.end(), {0x00, 0xFF, 0x03});
      put_vlq(body, static_cast<std::uint32_t>(track.name.size()));
      body.insert(body.end(), track.name.begin(), track.name.end());
    }
    // (tick, on?, pitch, channel, velocity); offs sort first at equal ticks.
    std::vector<std::tuple<std::int64_t, int, int, int, int>> events;
    for (const MidiNote& n : track.notes) {
      events.emplace_back(n.start_tick, 1, n.pitch, n.channel, n.velocity);
      events.emplace_back(n.end_tick, 0, n.pitch, n.channel, 0);
    }
    std::sort(events.begin(), events.end());
    std::int64_t last = 0;
    for (auto [tick, on, pitch, channel, velocity] : events) {
      put_vlq(body, static_cast<std::uint32_t>(tick - last));
      last = tick;
      body.push_back(static_cast<std::uint8_t>((on ? 0x90 : 0x80) | (channel & 0x0F)));
      body.push_back(static_cast<std::uint8_t>(pitch & 0x7F));
      body.push_back(static_cast<std::uint8_t>(on ? (velocity & 0x7F) : 0x40));
    }
    body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
    put_chunk(out, "MTrk", body);
  }
  return out;
}

}  // namespace melred
