#pragma once

// Procedural test corpus: each video pans across its own textured scene.
// Queries are indexed frames, either verbatim or recompressed with a
// brightness jitter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "evir/codec.hpp"
#include "evir/ingest.hpp"

namespace evir {

struct SynthConfig {
  int videos = 20;
  int frames = 50;
  int width = 320;
  int height = 240;
  double fps = 5.0;
  int queries_per_video = 5;
  int jpeg_quality = 75;
  double brightness_jitter = 0.05;
  std::uint64_t seed = 7;

  void validate() const {
    if (videos < 1 || frames < 1) fail(ErrorCode::InvalidArgument, "need at least one video and one frame");
    if (width < 32 || height < 32) fail(ErrorCode::InvalidArgument, "frames must be at least 32 x 32");
    if (!(fps > 0.0)) fail(ErrorCode::InvalidArgument, "fps must be > 0");
    if (queries_per_video < 0 || queries_per_video > frames) {
      fail(ErrorCode::InvalidArgument, "queries per video must be within 0..frames");
    }
    if (jpeg_quality < 1 || jpeg_quality > 100) fail(ErrorCode::InvalidArgument, "jpeg quality must be 1..100");
    if (brightness_jitter < 0.0 || brightness_jitter >= 1.0) fail(ErrorCode::InvalidArgument, "jitter must be in [0, 1)");
  }
};

namespace synth {

/// Platform-independent draws on top of mt19937_64.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double real(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::mt19937_64 rng_;
};

inline std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

inline Rgb from_hsv(double h, double s, double v) {
  h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0);
  const double c = v * s;
  const double x = c * (1.0 - std::fabs(std::fmod(h / 60.0, 2.0) - 1.0));
  const double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h / 60.0)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  return {clamp8((r + m) * 255.0), clamp8((g + m) * 255.0), clamp8((b + m) * 255.0)};
}

inline Rgb scale(Rgb p, double f) { return {clamp8(p.r * f), clamp8(p.g * f), clamp8(p.b * f)}; }

/// Smooth value noise on a lattice of `cell` pixels, values in [0, 1].
class ValueNoise {
 public:
  ValueNoise(int w, int h, int cell, Draw& draw) : cell_(cell), cols_(w / cell + 2), rows_(h / cell + 2) {
    lattice_.resize(static_cast<std::size_t>(cols_ * rows_));
    for (double& v : lattice_) v = draw.unit();
  }

  [[nodiscard]] double at(int x, int y) const {
    const double fx = static_cast<double>(x) / cell_;
    const double fy = static_cast<double>(y) / cell_;
    const int ix = static_cast<int>(fx);
    const int iy = static_cast<int>(fy);
    const double tx = smooth(fx - ix);
    const double ty = smooth(fy - iy);
    const double a = node(ix, iy) + (node(ix + 1, iy) - node(ix, iy)) * tx;
    const double b = node(ix, iy + 1) + (node(ix + 1, iy + 1) - node(ix, iy + 1)) * tx;
    return a + (b - a) * ty;
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  [[nodiscard]] double node(int x, int y) const { return lattice_[static_cast<std::size_t>(y * cols_ + x)]; }

  int cell_;
  int cols_;
  int rows_;
  std::vector<double> lattice_;
};

/// The scene a video pans across; twice the frame width, 1.5 times its height.
inline PixelGrid render_scene(const SynthConfig& cfg, int video) {
  Draw draw(cfg.seed * 1000003ull + static_cast<std::uint64_t>(video) * 7919ull + 1);
  const int w = cfg.width * 2;
  const int h = cfg.height * 3 / 2;
  const double hue = 360.0 * video / cfg.videos + draw.real(0.0, 360.0 / cfg.videos);
  auto palette = [&] {
    const double pick = draw.unit();
    if (pick < 0.12) return from_hsv(0.0, 0.0, draw.real(0.0, 1.0));  // neutral
    const double base = pick < 0.25 ? hue + 180.0 : hue;
    return from_hsv(base + draw.real(-25.0, 25.0), draw.real(0.35, 1.0), draw.real(0.25, 1.0));
  };

  const Rgb top = palette();
  const Rgb bottom = palette();
  const ValueNoise coarse(w, h, 48, draw);
  const ValueNoise fine(w, h, 6, draw);
  PixelGrid img(w, h);
  for (int y = 0; y < h; ++y) {
    const double t = static_cast<double>(y) / (h - 1);
    for (int x = 0; x < w; ++x) {
      const double shade = 0.7 + 0.45 * coarse.at(x, y) + 0.2 * (fine.at(x, y) - 0.5);
      const Rgb base{clamp8(top.r + (bottom.r - top.r) * t), clamp8(top.g + (bottom.g - top.g) * t),
                     clamp8(top.b + (bottom.b - top.b) * t)};
      img.at(x, y) = scale(base, shade);
    }
  }

  const int shapes = 70;
  for (int s = 0; s < shapes; ++s) {
    const Rgb c = palette();
    const int kind = draw.integer(0, 3);
    const int cx = draw.integer(0, w - 1);
    const int cy = draw.integer(0, h - 1);
    const int r = draw.integer(6, 40);
    const int r2 = draw.integer(6, 40);
    const double angle = draw.real(0.0, std::numbers::pi);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    const int reach = std::max(r, r2) + 2;
    for (int y = std::max(0, cy - reach); y <= std::min(h - 1, cy + reach); ++y) {
      for (int x = std::max(0, cx - reach); x <= std::min(w - 1, cx + reach); ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        const double u = dx * ca + dy * sa;
        const double v = -dx * sa + dy * ca;
        bool inside = false;
        switch (kind) {
          case 0: inside = std::fabs(u) <= r && std::fabs(v) <= r2; break;  // rotated box
          case 1: inside = (u * u) / (r * r) + (v * v) / (r2 * r2) <= 1.0; break;  // ellipse
          case 2: {  // ring
            const double d = std::sqrt(dx * dx + dy * dy);
            inside = d <= r && d >= r * 0.6;
            break;
          }
          default:  // striped box
            inside = std::fabs(u) <= r && std::fabs(v) <= r2 && (static_cast<int>(std::floor(u / 4.0)) & 1) == 0;
            break;
        }
        if (inside) img.at(x, y) = scale(c, 0.9 + 0.2 * fine.at(x, y));
      }
    }
  }
  return img;
}

/// Top-left corner of frame `i`: a left-to-right pan with a vertical sway.
inline std::pair<int, int> frame_origin(const SynthConfig& cfg, int i) {
  const int span_x = cfg.width;
  const int span_y = cfg.height / 2;
  const double t = cfg.frames == 1 ? 0.0 : static_cast<double>(i) / (cfg.frames - 1);
  const int x = static_cast<int>(std::lround(t * span_x));
  const int y = static_cast<int>(std::lround((0.5 + 0.5 * std::sin(t * 2.0 * std::numbers::pi)) * span_y));
  return {x, y};
}

inline std::vector<PixelGrid> render_video(const SynthConfig& cfg, int video) {
  const PixelGrid scene = render_scene(cfg, video);
  std::vector<PixelGrid> out;
  out.reserve(static_cast<std::size_t>(cfg.frames));
  for (int i = 0; i < cfg.frames; ++i) {
    const auto [x, y] = frame_origin(cfg, i);
    out.push_back(crop(scene, x, y, x + cfg.width, y + cfg.height));
  }
  return out;
}

/// Frame indices chosen as queries for one video, evenly spread and offset.
inline std::vector<int> query_frames(const SynthConfig& cfg, int video) {
  std::vector<int> out;
  const int q = cfg.queries_per_video;
  for (int j = 0; j < q; ++j) {
    const int step = cfg.frames / std::max(1, q);
    const int offset = step > 1 ? (video * 3 + j) % step : 0;
    out.push_back(std::min(cfg.frames - 1, j * step + offset));
  }
  return out;
}

/// Brightness scaled by `factor`.
inline PixelGrid brighten(const PixelGrid& img, double factor) {
  PixelGrid out = img;
  for (Rgb& p : out.pixels()) p = scale(p, factor);
  return out;
}

}  // namespace synth

inline std::string synth_video_id(int video) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "vid%02d", video);
  return buf;
}

inline std::string synth_query_id(int video, int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "q_vid%02d_f%04d", video, frame);
  return buf;
}

struct SynthCorpus {
  fs::path root;
  fs::path manifest;      // manifest.tsv
  fs::path ground_truth;  // gt.tsv, valid for both query sets
  fs::path exact_queries;
  fs::path near_queries;
  std::size_t frames = 0;
  std::size_t queries = 0;
};

/// Writes frames/<video>/frame_NNNN.png, manifest.tsv, gt.tsv,
/// queries/exact/<id>.png and queries/near/<id>.jpg under `root`.
inline SynthCorpus write_synth_corpus(const SynthConfig& cfg, const fs::path& root) {
  cfg.validate();
  SynthCorpus out{root, root / "manifest.tsv", root / "gt.tsv", root / "queries" / "exact", root / "queries" / "near"};
  fs::create_directories(out.exact_queries);
  fs::create_directories(out.near_queries);
  CorpusManifest manifest;
  std::string gt = "# query_id\tvideo_id\n";
  synth::Draw jitter(cfg.seed ^ 0xB5297A4D3F84D5B5ull);
  for (int v = 0; v < cfg.videos; ++v) {
    const std::string vid = synth_video_id(v);
    const fs::path dir = root / "frames" / vid;
    fs::create_directories(dir);
    const std::vector<PixelGrid> frames = synth::render_video(cfg, v);
    for (int i = 0; i < cfg.frames; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04d.png", i);
      write_file(dir / name, encode_png(frames[static_cast<std::size_t>(i)]));
    }
    out.frames += frames.size();
    manifest.records.push_back({vid, fs::path("frames") / vid, cfg.frames / cfg.fps});
    for (int f : synth::query_frames(cfg, v)) {
      const std::string qid = synth_query_id(v, f);
      const PixelGrid& frame = frames[static_cast<std::size_t>(f)];
      write_file(out.exact_queries / (qid + ".png"), encode_png(frame));
      const double factor = 1.0 + jitter.real(-cfg.brightness_jitter, cfg.brightness_jitter);
      write_file(out.near_queries / (qid + ".jpg"), encode_jpeg(synth::brighten(frame, factor), cfg.jpeg_quality));
      gt += qid + "\t" + vid + "\n";
      ++out.queries;
    }
  }
  const std::string m = format_manifest(manifest);
  write_file(out.manifest, std::span(reinterpret_cast<const std::uint8_t*>(m.data()), m.size()));
  write_file(out.ground_truth, std::span(reinterpret_cast<const std::uint8_t*>(gt.data()), gt.size()));
  return out;
}

}  // namespace evir
