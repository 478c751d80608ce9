#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "evir/imaging.hpp"

namespace fixtures {

inline evir::PixelGrid uniform(int w, int h, evir::Rgb c) { return evir::PixelGrid(w, h, c); }

/// Per-pixel uniform noise.
inline evir::PixelGrid noise(int w, int h, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ch(0, 255);
  evir::PixelGrid img(w, h);
  for (auto& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(ch(rng)), static_cast<std::uint8_t>(ch(rng)), static_cast<std::uint8_t>(ch(rng))};
  }
  return img;
}

/// Random axis-aligned colored rectangles on a random background.
inline evir::PixelGrid blocks(int w, int h, std::mt19937_64& rng, int count = 6) {
  std::uniform_int_distribution<int> ch(0, 255);
  auto color = [&] {
    return evir::Rgb{static_cast<std::uint8_t>(ch(rng)), static_cast<std::uint8_t>(ch(rng)),
                     static_cast<std::uint8_t>(ch(rng))};
  };
  evir::PixelGrid img(w, h, color());
  std::uniform_int_distribution<int> xs(0, w - 1);
  std::uniform_int_distribution<int> ys(0, h - 1);
  for (int i = 0; i < count; ++i) {
    int x0 = xs(rng), x1 = xs(rng), y0 = ys(rng), y1 = ys(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const evir::Rgb c = color();
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) img.at(x, y) = c;
  }
  return img;
}

/// Mix of uniform, noise and block images, the generator used by the property suites.
inline evir::PixelGrid random_image(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> side(8, 64);
  const int w = side(rng);
  const int h = side(rng);
  switch (rng() % 4) {
    case 0: {
      std::uniform_int_distribution<int> ch(0, 255);
      return uniform(w, h, {static_cast<std::uint8_t>(ch(rng)), static_cast<std::uint8_t>(ch(rng)),
                            static_cast<std::uint8_t>(ch(rng))});
    }
    case 1: return noise(w, h, rng);
    default: return blocks(w, h, rng);
  }
}

/// Gaussian blob of the given sigma on a black field, peak 255.
inline evir::PixelGrid gaussian_blob(int w, int h, double cx, double cy, double sigma) {
  evir::PixelGrid img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * std::exp(-d2 / (2.0 * sigma * sigma))));
      img.at(x, y) = {v, v, v};
    }
  }
  return img;
}

}  // namespace fixtures

#include <set>

#include "evir/index.hpp"

namespace fixtures {

/// 512 x 144 vocabulary of random 3-bit centroids; stands in for a trained one.
inline evir::Vocabulary random_vocabulary(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> v(0, 7);
  std::vector<float> c(512 * 144);
  for (float& x : c) x = static_cast<float>(v(rng));
  return evir::Vocabulary(512, 144, std::move(c), seed, 0);
}

/// 512 x 144 vocabulary whose words are distinct local descriptors of random
/// block images, so real patches spread over many words.
inline evir::Vocabulary sampled_vocabulary(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::vector<float>> seen;
  std::vector<float> c;
  while (seen.size() < 512) {
    const evir::PixelGrid img = blocks(160, 120, rng, 14);
    for (const auto& ld : evir::local_features(img, evir::DetectorParams{})) {
      std::vector<float> v(ld.values.values().begin(), ld.values.values().end());
      if (seen.size() < 512 && seen.insert(v).second) c.insert(c.end(), v.begin(), v.end());
    }
  }
  return evir::Vocabulary(512, 144, std::move(c), seed, 0);
}

/// Random but structured frame descriptors, no image needed.
inline evir::FrameDescriptors random_descriptors(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> q(0, 7);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> cedd(144), acc(256), phog(630), bovw(512, 0.0f);
  for (float& x : cedd) x = static_cast<float>(q(rng));
  for (float& x : acc) x = u(rng);
  double total = 0.0;
  for (float& x : phog) total += x = u(rng);
  for (float& x : phog) x = static_cast<float>(x / total);
  double norm = 0.0;
  for (int i = 0; i < 12; ++i) {
    float& x = bovw[rng() % 512];
    x += 1.0f;
  }
  for (float x : bovw) norm += static_cast<double>(x) * x;
  for (float& x : bovw) x = static_cast<float>(x / std::sqrt(norm));
  evir::FrameDescriptors d;
  d.cedd = evir::Descriptor(evir::Model::Cedd, cedd);
  d.acc = evir::Descriptor(evir::Model::Acc, acc);
  d.phog = evir::Descriptor(evir::Model::Phog, phog);
  d.bovw = evir::Descriptor(evir::Model::Bovw, bovw);
  return d;
}

/// Index of `frames` random descriptor rows spread over `videos` videos.
inline evir::Index random_index(std::size_t frames, std::size_t videos, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  evir::Index idx;
  std::vector<std::uint32_t> next(videos, 0);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t v = i % videos;
    const auto ref = evir::make_frame_ref("v" + std::to_string(v), next[v]++, idx.config().sampling_fps);
    idx.add_descriptors(evir::FrameRecord{ref, 64, 48, {}}, random_descriptors(rng));
  }
  return idx;
}

}  // namespace fixtures
