#pragma once

// Auto color correlogram over a 64-color RGB palette.

#include <array>
#include <cstdint>
#include <vector>

#include "evir/descriptor.hpp"
#include "evir/imaging.hpp"

namespace evir::acc {

inline constexpr int kColors = 64;
inline constexpr std::array<int, 4> kDistances = {1, 3, 5, 7};

/// 4 x 4 x 4 uniform RGB quantization.
constexpr int quantize(const Rgb& p) noexcept { return (p.r >> 6) * 16 + (p.g >> 6) * 4 + (p.b >> 6); }

/// Output layout: entry (color * 4 + distance_slot).
constexpr std::size_t entry(int color, std::size_t distance_slot) noexcept {
  return static_cast<std::size_t>(color) * kDistances.size() + distance_slot;
}

}  // namespace evir::acc

namespace evir {

/// For each quantized color c and ring distance d, the mean over pixels of
/// color c of the fraction of in-image pixels at chessboard distance exactly d
/// that also have color c. Pixels whose ring lies entirely outside the image
/// do not contribute.
inline Descriptor extract_acc(const PixelGrid& img) {
  require_min_size(img, 8, "ACC");
  const int w = img.width();
  const int h = img.height();

  std::vector<std::uint8_t> q(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) q[static_cast<std::size_t>(y * w + x)] = static_cast<std::uint8_t>(acc::quantize(img.at(x, y)));
  }
  auto color_at = [&](int x, int y) { return q[static_cast<std::size_t>(y * w + x)]; };

  std::array<double, acc::kColors * acc::kDistances.size()> prob_sum{};
  std::array<double, acc::kColors * acc::kDistances.size()> pixel_count{};

  for (std::size_t slot = 0; slot < acc::kDistances.size(); ++slot) {
    const int d = acc::kDistances[slot];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t c = color_at(x, y);
        int inside = 0;
        int same = 0;
        auto visit = [&](int px, int py) {
          if (px < 0 || py < 0 || px >= w || py >= h) return;
          ++inside;
          same += color_at(px, py) == c ? 1 : 0;
        };
        // Top and bottom rows of the ring, then the left and right columns without corners.
        for (int dx = -d; dx <= d; ++dx) {
          visit(x + dx, y - d);
          visit(x + dx, y + d);
        }
        for (int dy = -d + 1; dy <= d - 1; ++dy) {
          visit(x - d, y + dy);
          visit(x + d, y + dy);
        }
        if (inside == 0) continue;
        prob_sum[acc::entry(c, slot)] += static_cast<double>(same) / inside;
        pixel_count[acc::entry(c, slot)] += 1.0;
      }
    }
  }

  std::vector<float> values(dimension(Model::Acc), 0.0f);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (pixel_count[i] > 0.0) values[i] = static_cast<float>(prob_sum[i] / pixel_count[i]);
  }
  return Descriptor(Model::Acc, std::move(values));
}

}  // namespace evir
