#pragma once

// Pyramid histogram of oriented gradients: Sobel gradients on luma, signed
// orientation soft-binned into 30 bins, pooled over a 3-level spatial pyramid.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "evir/descriptor.hpp"
#include "evir/imaging.hpp"

namespace evir::phog {

inline constexpr int kBins = 30;
inline constexpr int kLevels = 3;  // 1 + 4 + 16 cells
inline constexpr double kBinWidth = 360.0 / kBins;

struct Gradient {
  double magnitude = 0.0;
  double orientation = 0.0;  // degrees, [0, 360)
};

/// Sobel gradient with replicated borders. Orientation follows atan2(gy, gx)
/// with y growing downward.
inline std::vector<Gradient> sobel(const LumaGrid& luma) {
  const int w = luma.width();
  const int h = luma.height();
  auto px = [&](int x, int y) { return luma.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

  std::vector<Gradient> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
      Gradient& g = out[static_cast<std::size_t>(y * w + x)];
      g.magnitude = std::hypot(gx, gy);
      if (g.magnitude > 0.0) {
        double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
        if (deg < 0.0) deg += 360.0;
        if (deg >= 360.0) deg -= 360.0;
        g.orientation = deg;
      }
    }
  }
  return out;
}

/// Splits a unit of weight between the two bins whose centers (multiples of
/// 12 degrees) bracket the orientation.
struct SoftBin {
  int lower;
  int upper;
  double upper_weight;
};

inline SoftBin soft_bin(double orientation) noexcept {
  const double pos = orientation / kBinWidth;
  const double base = std::floor(pos);
  const int lower = static_cast<int>(base) % kBins;
  return {lower, (lower + 1) % kBins, pos - base};
}

/// Offset of the first histogram of pyramid level `level` (0, 1 or 2).
constexpr int level_offset(int level) noexcept {
  int cells = 0;
  for (int l = 0; l < level; ++l) cells += (1 << l) * (1 << l);
  return cells * kBins;
}

}  // namespace evir::phog

namespace evir {

inline Descriptor extract_phog(const PixelGrid& img) {
  require_min_size(img, 8, "PHOG");
  const int w = img.width();
  const int h = img.height();
  const auto grads = phog::sobel(to_grayscale(img));

  std::vector<double> hist(dimension(Model::Phog), 0.0);
  for (int level = 0; level < phog::kLevels; ++level) {
    const int cells = 1 << level;
    const int offset = phog::level_offset(level);
    for (int y = 0; y < h; ++y) {
      const int cy = y * cells / h;
      for (int x = 0; x < w; ++x) {
        const phog::Gradient& g = grads[static_cast<std::size_t>(y * w + x)];
        if (g.magnitude <= 0.0) continue;
        const int cx = x * cells / w;
        const int cell_base = offset + (cy * cells + cx) * phog::kBins;
        const phog::SoftBin sb = phog::soft_bin(g.orientation);
        hist[static_cast<std::size_t>(cell_base + sb.lower)] += g.magnitude * (1.0 - sb.upper_weight);
        hist[static_cast<std::size_t>(cell_base + sb.upper)] += g.magnitude * sb.upper_weight;
      }
    }
  }

  double total = 0.0;
  for (double v : hist) total += v;
  std::vector<float> values(hist.size(), 0.0f);
  if (total > 0.0) {
    for (std::size_t i = 0; i < hist.size(); ++i) values[i] = static_cast<float>(hist[i] / total);
  }
  return Descriptor(Model::Phog, std::move(values));
}

}  // namespace evir
