#pragma once

// Binary index file.
//
//   "EVIR"  u16 version
//   config block | frame table | vocabulary block | 4 descriptor blocks
//   u32 CRC32 of every byte between the version and the checksum
//
// Integers are little-endian, reals are IEEE-754 binary32, CEDD bins are one
// byte each. Strings are a u32 byte length followed by UTF-8 bytes.

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "evir/codec.hpp"
#include "evir/index.hpp"

namespace evir {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'E', 'V', 'I', 'R'};
inline constexpr std::uint16_t kFormatVersion = 1;

namespace io {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void raw(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

  [[nodiscard]] Bytes& bytes() noexcept { return buf_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  Bytes buf_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    const auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  [[nodiscard]] bool done() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(ErrorCode::Malformed, "unexpected end of data");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

inline void begin(Writer& w) {
  w.raw(kMagic);
  w.u16(kFormatVersion);
}

inline Bytes finish(Writer& w) {
  Bytes& b = w.bytes();
  const std::uint32_t crc = crc32_of(std::span<const std::uint8_t>(b).subspan(6));
  w.u32(crc);
  return std::move(b);
}

/// Validates framing and returns the body between the version and the checksum.
inline std::span<const std::uint8_t> open(std::span<const std::uint8_t> file) {
  if (file.size() < 6 || !std::equal(kMagic.begin(), kMagic.end(), file.begin())) {
    fail(ErrorCode::FormatVersionMismatch, "not an EVIR file");
  }
  const std::uint16_t version = static_cast<std::uint16_t>(file[4] | (file[5] << 8));
  if (version != kFormatVersion) {
    fail(ErrorCode::FormatVersionMismatch,
         "format version " + std::to_string(version) + ", expected " + std::to_string(kFormatVersion));
  }
  if (file.size() < 10) fail(ErrorCode::ChecksumMismatch, "file truncated");
  const auto body = file.subspan(6, file.size() - 10);
  const auto tail = file.subspan(file.size() - 4);
  const std::uint32_t stored = tail[0] | (tail[1] << 8) | (tail[2] << 16) | (static_cast<std::uint32_t>(tail[3]) << 24);
  if (crc32_of(body) != stored) fail(ErrorCode::ChecksumMismatch, "checksum does not match contents");
  return body;
}

inline void write_config(Writer& w, const IndexConfig& c) {
  w.f32(c.sampling_fps);
  w.f32(c.detector.threshold);
  w.u32(static_cast<std::uint32_t>(c.detector.octaves));
  w.u64(c.vocab_seed);
  w.u32(c.vocab_max_iter);
  w.u32(c.vocab_sample_budget);
  w.u8(static_cast<std::uint8_t>(c.cedd_metric));
  w.u8(static_cast<std::uint8_t>(c.acc_metric));
  w.u8(static_cast<std::uint8_t>(c.phog_metric));
  w.u32(c.default_top_n);
}

inline DistanceMetric read_metric(Reader& r) {
  const std::uint8_t v = r.u8();
  if (v > 1) fail(ErrorCode::Malformed, "unknown distance metric " + std::to_string(v));
  return static_cast<DistanceMetric>(v);
}

inline IndexConfig read_config(Reader& r) {
  IndexConfig c;
  c.sampling_fps = r.f32();
  c.detector.threshold = r.f32();
  c.detector.octaves = static_cast<int>(r.u32());
  c.vocab_seed = r.u64();
  c.vocab_max_iter = r.u32();
  c.vocab_sample_budget = r.u32();
  c.cedd_metric = read_metric(r);
  c.acc_metric = read_metric(r);
  c.phog_metric = read_metric(r);
  c.default_top_n = r.u32();
  return c;
}

inline void write_vocabulary(Writer& w, const Vocabulary& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  w.u32(static_cast<std::uint32_t>(v.dim()));
  w.u64(v.seed());
  w.u32(static_cast<std::uint32_t>(v.iterations_run()));
  for (float x : v.centroids()) w.f32(x);
}

inline Vocabulary read_vocabulary(Reader& r) {
  const std::uint32_t k = r.u32();
  const std::uint32_t dim = r.u32();
  const std::uint64_t seed = r.u64();
  const auto iterations = static_cast<int>(r.u32());
  if (k == 0) return {};
  const std::uint64_t count = static_cast<std::uint64_t>(k) * dim;
  std::vector<float> c;
  c.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) c.push_back(r.f32());
  return Vocabulary(k, dim, std::move(c), seed, iterations);
}

}  // namespace io

inline Bytes serialize_index(const Index& idx) {
  io::Writer w;
  io::begin(w);
  io::write_config(w, idx.config());

  const auto& videos = idx.videos();
  w.u32(static_cast<std::uint32_t>(videos.size()));
  std::map<std::string, std::uint32_t> ordinal;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    w.str(videos[i].video_id);
    w.f32(videos[i].duration);
    ordinal.emplace(videos[i].video_id, static_cast<std::uint32_t>(i));
  }
  w.u32(static_cast<std::uint32_t>(idx.size()));
  for (const FrameRecord& f : idx.frames()) {
    w.u32(ordinal.at(f.ref.video_id));
    w.u32(f.ref.frame_index);
    w.u32(static_cast<std::uint32_t>(f.width));
    w.u32(static_cast<std::uint32_t>(f.height));
    w.str(f.source);
  }

  io::write_vocabulary(w, idx.vocabulary());

  for (Model m : kAllModels) {
    w.u8(static_cast<std::uint8_t>(m));
    w.u32(static_cast<std::uint32_t>(dimension(m)));
    w.u32(static_cast<std::uint32_t>(idx.size()));
    if (m == Model::Cedd) {
      w.raw(idx.cedd_table());
    } else {
      for (float x : idx.float_table(m)) w.f32(x);
    }
  }
  return io::finish(w);
}

inline Index deserialize_index(std::span<const std::uint8_t> file) {
  io::Reader r(io::open(file));
  const IndexConfig config = io::read_config(r);
  Index idx(config);

  const std::uint32_t video_count = r.u32();
  std::vector<std::pair<std::string, float>> videos;
  for (std::uint32_t i = 0; i < video_count; ++i) {
    std::string id = r.str();
    const float duration = r.f32();
    videos.emplace_back(std::move(id), duration);
  }
  const std::uint32_t frame_count = r.u32();
  std::vector<FrameRecord> frames;
  for (std::uint32_t i = 0; i < frame_count; ++i) {
    const std::uint32_t v = r.u32();
    if (v >= video_count) fail(ErrorCode::Malformed, "frame refers to unknown video");
    FrameRecord f;
    f.ref = make_frame_ref(videos[v].first, r.u32(), config.sampling_fps);
    f.width = static_cast<int>(r.u32());
    f.height = static_cast<int>(r.u32());
    f.source = r.str();
    frames.push_back(std::move(f));
  }

  Vocabulary vocab = io::read_vocabulary(r);
  if (!vocab.empty()) idx.set_vocabulary(std::move(vocab));

  std::array<std::vector<float>, 4> tables;
  for (Model m : kAllModels) {
    const std::uint8_t tag = r.u8();
    const std::uint32_t dim = r.u32();
    const std::uint32_t count = r.u32();
    if (tag != static_cast<std::uint8_t>(m) || dim != dimension(m) || count != frame_count) {
      fail(ErrorCode::Malformed, "descriptor block for " + std::string(to_string(m)) + " does not match the frame table");
    }
    auto& t = tables[static_cast<std::size_t>(m)];
    const std::size_t n = static_cast<std::size_t>(dim) * count;
    if (m == Model::Cedd) {
      const auto raw = r.raw(n);
      t.assign(raw.begin(), raw.end());
    } else {
      t.reserve(n);
      for (std::size_t i = 0; i < n; ++i) t.push_back(r.f32());
    }
  }
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes after descriptor blocks");

  for (std::uint32_t i = 0; i < frame_count; ++i) {
    FrameDescriptors d;
    for (Model m : kAllModels) {
      const std::size_t dim = dimension(m);
      const auto& t = tables[static_cast<std::size_t>(m)];
      std::vector<float> v(t.begin() + static_cast<std::ptrdiff_t>(i * dim),
                           t.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
      Descriptor desc(m, std::move(v));
      switch (m) {
        case Model::Cedd: d.cedd = std::move(desc); break;
        case Model::Acc: d.acc = std::move(desc); break;
        case Model::Phog: d.phog = std::move(desc); break;
        case Model::Bovw: d.bovw = std::move(desc); break;
      }
    }
    idx.add_descriptors(std::move(frames[i]), d);
  }
  for (const auto& [id, duration] : videos) {
    if (idx.find_video(id) != nullptr) idx.set_video_duration(id, duration);
  }
  return idx;
}

inline void persist(const Index& idx, const std::filesystem::path& path) { write_file(path, serialize_index(idx)); }

inline Index load_index(const std::filesystem::path& path) { return deserialize_index(read_file(path)); }

/// Standalone vocabulary file: same framing, vocabulary block only.
inline Bytes serialize_vocabulary(const Vocabulary& v) {
  io::Writer w;
  io::begin(w);
  io::write_vocabulary(w, v);
  return io::finish(w);
}

inline Vocabulary deserialize_vocabulary(std::span<const std::uint8_t> file) {
  io::Reader r(io::open(file));
  Vocabulary v = io::read_vocabulary(r);
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes after vocabulary");
  return v;
}

}  // namespace evir
