#pragma once

// Pixel-level primitives shared by every descriptor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evir/error.hpp"

namespace evir {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster. Always at least 1x1.
class PixelGrid {
 public:
  PixelGrid() : PixelGrid(1, 1) {}

  PixelGrid(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      fail(ErrorCode::BadDimensions,
           "pixel grid must be at least 1x1, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  PixelGrid(int width, int height, std::vector<Rgb> pixels) : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1 || pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      fail(ErrorCode::BadDimensions, "pixel buffer does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::span<const Rgb> pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::span<Rgb> pixels() noexcept { return pixels_; }

  [[nodiscard]] const Rgb& at(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }
  [[nodiscard]] Rgb& at(int x, int y) noexcept {
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Row-major luminance in [0, 255].
class LumaGrid {
 public:
  LumaGrid(int width, int height, double fill = 0.0) : width_(width), height_(height) {
    if (width < 1 || height < 1) fail(ErrorCode::BadDimensions, "luma grid must be at least 1x1");
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double at(int x, int y) const noexcept {
    return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }
  [[nodiscard]] double& at(int x, int y) noexcept {
    return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

/// Summed-area table with a zero first row and column: entry (x, y) holds the
/// sum of all luma values strictly above and left of pixel (x, y).
class IntegralGrid {
 public:
  explicit IntegralGrid(const LumaGrid& luma)
      : width_(luma.width()), height_(luma.height()),
        sums_(static_cast<std::size_t>(width_ + 1) * static_cast<std::size_t>(height_ + 1), 0.0) {
    for (int y = 0; y < height_; ++y) {
      double row = 0.0;
      for (int x = 0; x < width_; ++x) {
        row += luma.at(x, y);
        entry(x + 1, y + 1) = entry(x + 1, y) + row;
      }
    }
  }

  /// Image dimensions (the table itself is one larger in each direction).
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }

  [[nodiscard]] double at(int x, int y) const noexcept {
    return sums_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) + static_cast<std::size_t>(x)];
  }

  /// Sum over the half-open rectangle [x0, x1) x [y0, y1).
  [[nodiscard]] double rect_sum(int x0, int y0, int x1, int y1) const noexcept {
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  }

  /// Like rect_sum, but the rectangle is first clipped to the image; pixels
  /// outside the image count as zero.
  [[nodiscard]] double clipped_sum(int x0, int y0, int x1, int y1) const noexcept {
    x0 = std::clamp(x0, 0, width_);
    x1 = std::clamp(x1, 0, width_);
    y0 = std::clamp(y0, 0, height_);
    y1 = std::clamp(y1, 0, height_);
    if (x1 <= x0 || y1 <= y0) return 0.0;
    return rect_sum(x0, y0, x1, y1);
  }

 private:
  double& entry(int x, int y) noexcept {
    return sums_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) + static_cast<std::size_t>(x)];
  }

  int width_;
  int height_;
  std::vector<double> sums_;
};

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

inline double luma_of(const Rgb& p) noexcept {
  return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
}

inline LumaGrid to_grayscale(const PixelGrid& img) {
  LumaGrid out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = luma_of(img.at(x, y));
  }
  return out;
}

/// Hexcone conversion; hue is 0 for achromatic input.
inline Hsv rgb_to_hsv(const Rgb& p) noexcept {
  const double r = p.r / 255.0;
  const double g = p.g / 255.0;
  const double b = p.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;

  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) return out;

  double h = 0.0;
  if (mx == r) {
    h = 60.0 * std::fmod((g - b) / delta, 6.0);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

/// Bilinear resampling with pixel-center alignment.
inline PixelGrid resize(const PixelGrid& img, int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::BadDimensions, "resize target must be at least 1x1, got " + std::to_string(width) + "x" +
                                       std::to_string(height));
  }
  if (width == img.width() && height == img.height()) return img;

  PixelGrid out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  const double max_x = img.width() - 1;
  const double max_y = img.height() - 1;

  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, max_y);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, max_x);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;

      const Rgb& p00 = img.at(x0, y0);
      const Rgb& p10 = img.at(x1, y0);
      const Rgb& p01 = img.at(x0, y1);
      const Rgb& p11 = img.at(x1, y1);
      auto blend = [&](std::uint8_t Rgb::*channel) {
        const double top = (1.0 - wx) * (p00.*channel) + wx * (p10.*channel);
        const double bottom = (1.0 - wx) * (p01.*channel) + wx * (p11.*channel);
        const double v = (1.0 - wy) * top + wy * bottom;
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      };
      out.at(x, y) = Rgb{blend(&Rgb::r), blend(&Rgb::g), blend(&Rgb::b)};
    }
  }
  return out;
}

inline void require_min_size(const PixelGrid& img, int side, const char* what) {
  if (img.width() < side || img.height() < side) {
    fail(ErrorCode::ImageTooSmall, std::string(what) + " needs at least " + std::to_string(side) + "x" +
                                       std::to_string(side) + ", got " + std::to_string(img.width()) + "x" +
                                       std::to_string(img.height()));
  }
}

inline IntegralGrid integral_image(const LumaGrid& luma) { return IntegralGrid(luma); }

/// Copy of the half-open rectangle [x0, x1) x [y0, y1), which must lie inside the image.
inline PixelGrid crop(const PixelGrid& img, int x0, int y0, int x1, int y1) {
  if (x0 < 0 || y0 < 0 || x1 > img.width() || y1 > img.height() || x1 <= x0 || y1 <= y0) {
    fail(ErrorCode::BadDimensions, "crop rectangle outside image");
  }
  PixelGrid out(x1 - x0, y1 - y0);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) out.at(x - x0, y - y0) = img.at(x, y);
  }
  return out;
}

}  // namespace evir
