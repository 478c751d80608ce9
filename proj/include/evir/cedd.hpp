#pragma once

// Color and Edge Directivity Descriptor: a 6 x 24 joint histogram of texture
// class and fuzzy color, accumulated over a block grid and quantized to 3 bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "evir/descriptor.hpp"
#include "evir/error.hpp"
#include "evir/imaging.hpp"

namespace evir::cedd {

inline constexpr int kTextureClasses = 6;
inline constexpr int kColors = 24;
inline constexpr int kMaxGrid = 40;
inline constexpr int kMinBlockSide = 2;

enum Texture : int { NoEdge = 0, NonDirectional = 1, Horizontal = 2, Vertical = 3, Diagonal45 = 4, Diagonal135 = 5 };

// 10-bin stage output order.
enum Color10 : int { Black = 0, Gray = 1, White = 2, Red = 3, Orange = 4, Yellow = 5, Green = 6, Cyan = 7, Blue = 8, Magenta = 9 };

/// Index of a 24-bin color: 0 black, 1 gray, 2 white, then dark/normal/light
/// triples for red, orange, yellow, green, cyan, blue, magenta.
constexpr int color24(Color10 hue, int shade) noexcept {
  return hue <= White ? static_cast<int>(hue) : 3 + (static_cast<int>(hue) - Red) * 3 + shade;
}
inline constexpr int kDark = 0;
inline constexpr int kNormal = 1;
inline constexpr int kLight = 2;

constexpr int bin(Texture t, int color) noexcept { return static_cast<int>(t) * kColors + color; }

struct Trapezoid {
  double a, b, c, d;

  [[nodiscard]] constexpr double operator()(double x) const noexcept {
    if (x < a || x > d) return 0.0;
    if (x < b) return (x - a) / (b - a);
    if (x <= c) return 1.0;
    return (x - d) / (c - d);
  }
};

namespace detail {

// Each set of trapezoids forms a partition of unity over its domain, so the
// product rule base below always distributes exactly one unit of membership.
inline constexpr std::array<Trapezoid, 8> kHue = {{{0, 0, 5, 10},
                                                   {5, 10, 35, 50},
                                                   {35, 50, 70, 85},
                                                   {70, 85, 150, 165},
                                                   {150, 165, 195, 205},
                                                   {195, 205, 265, 280},
                                                   {265, 280, 315, 330},
                                                   {315, 330, 360, 360}}};
inline constexpr std::array<Color10, 8> kHueColor = {Red, Orange, Yellow, Green, Cyan, Blue, Magenta, Red};
inline constexpr std::array<Trapezoid, 2> kSaturation10 = {{{0, 0, 10, 75}, {10, 75, 255, 255}}};
inline constexpr std::array<Trapezoid, 3> kValue10 = {{{0, 0, 10, 75}, {10, 75, 180, 220}, {180, 220, 255, 255}}};
inline constexpr std::array<Trapezoid, 2> kSplit24 = {{{0, 0, 68, 188}, {68, 188, 255, 255}}};

inline constexpr double kEdgeThreshold = 14.0;
inline constexpr double kNonDirectionalThreshold = 0.68;
inline constexpr double kDirectionalThreshold = 0.98;

}  // namespace detail

/// Fuzzy membership over the 10 coarse colors. h in degrees, s and v in [0, 255].
inline std::array<double, 10> fuzzy10(double h, double s, double v) noexcept {
  std::array<double, 10> out{};
  for (std::size_t hi = 0; hi < detail::kHue.size(); ++hi) {
    const double mh = detail::kHue[hi](h);
    if (mh == 0.0) continue;
    for (std::size_t si = 0; si < 2; ++si) {
      const double ms = detail::kSaturation10[si](s);
      if (ms == 0.0) continue;
      for (std::size_t vi = 0; vi < 3; ++vi) {
        const double act = mh * ms * detail::kValue10[vi](v);
        if (act == 0.0) continue;
        Color10 target = Black;
        if (vi == 0) {
          target = Black;
        } else if (si == 0) {
          target = vi == 1 ? Gray : White;
        } else {
          target = detail::kHueColor[hi];
        }
        out[static_cast<std::size_t>(target)] += act;
      }
    }
  }
  return out;
}

/// Expands the 10-bin membership into 24 bins by splitting each hue into
/// dark / normal / light shades according to saturation and value.
inline std::array<double, kColors> fuzzy24(const std::array<double, 10>& coarse, double s, double v) noexcept {
  std::array<double, kColors> out{};
  out[0] = coarse[Black];
  out[1] = coarse[Gray];
  out[2] = coarse[White];
  const double s_low = detail::kSplit24[0](s);
  const double s_high = detail::kSplit24[1](s);
  const double v_low = detail::kSplit24[0](v);
  const double v_high = detail::kSplit24[1](v);
  for (int c = Red; c <= Magenta; ++c) {
    const double m = coarse[static_cast<std::size_t>(c)];
    if (m == 0.0) continue;
    const auto hue = static_cast<Color10>(c);
    out[static_cast<std::size_t>(color24(hue, kDark))] += m * v_low;
    out[static_cast<std::size_t>(color24(hue, kNormal))] += m * v_high * s_high;
    out[static_cast<std::size_t>(color24(hue, kLight))] += m * v_high * s_low;
  }
  return out;
}

inline std::array<double, kColors> fuzzy_color(const Rgb& mean) noexcept {
  const Hsv hsv = rgb_to_hsv(mean);
  const double s = hsv.s * 255.0;
  const double v = hsv.v * 255.0;
  return fuzzy24(fuzzy10(hsv.h, s, v), s, v);
}

/// Responses of the five 2x2 directional filters applied to the mean luma of
/// the four sub-blocks (top-left, top-right, bottom-left, bottom-right).
struct FilterResponses {
  double non_directional, horizontal, vertical, diagonal45, diagonal135;
};

inline FilterResponses texture_filters(double tl, double tr, double bl, double br) noexcept {
  constexpr double kSqrt2 = 1.4142135623730951;
  return {std::fabs(2.0 * tl - 2.0 * tr - 2.0 * bl + 2.0 * br), std::fabs(tl + tr - bl - br),
          std::fabs(tl - tr + bl - br), std::fabs(kSqrt2 * tl - kSqrt2 * br), std::fabs(kSqrt2 * tr - kSqrt2 * bl)};
}

/// Texture classes activated by one block. A block whose strongest response is
/// below the edge threshold is "no edge"; otherwise every filter within the
/// relative threshold of the strongest one fires.
inline std::vector<Texture> classify_texture(const FilterResponses& f) {
  const double mx = std::max({f.non_directional, f.horizontal, f.vertical, f.diagonal45, f.diagonal135});
  if (mx < detail::kEdgeThreshold) return {NoEdge};
  std::vector<Texture> out;
  if (f.non_directional / mx >= detail::kNonDirectionalThreshold) out.push_back(NonDirectional);
  if (f.horizontal / mx >= detail::kDirectionalThreshold) out.push_back(Horizontal);
  if (f.vertical / mx >= detail::kDirectionalThreshold) out.push_back(Vertical);
  if (f.diagonal45 / mx >= detail::kDirectionalThreshold) out.push_back(Diagonal45);
  if (f.diagonal135 / mx >= detail::kDirectionalThreshold) out.push_back(Diagonal135);
  return out;
}

/// Unquantized histogram (sums of fuzzy memberships per texture/color bin).
inline std::array<double, 144> raw_histogram(const PixelGrid& img) {
  const int w = img.width();
  const int h = img.height();
  const int gx = std::min(kMaxGrid, w / kMinBlockSide);
  const int gy = std::min(kMaxGrid, h / kMinBlockSide);

  std::array<double, 144> hist{};
  for (int by = 0; by < gy; ++by) {
    const int y0 = by * h / gy;
    const int y1 = (by + 1) * h / gy;
    const int ym = y0 + (y1 - y0) / 2;
    for (int bx = 0; bx < gx; ++bx) {
      const int x0 = bx * w / gx;
      const int x1 = (bx + 1) * w / gx;
      const int xm = x0 + (x1 - x0) / 2;

      std::array<double, 4> luma{};
      std::array<int, 4> count{};
      double r = 0.0;
      double g = 0.0;
      double b = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const Rgb& p = img.at(x, y);
          const std::size_t q = (y < ym ? 0u : 2u) + (x < xm ? 0u : 1u);
          luma[q] += luma_of(p);
          ++count[q];
          r += p.r;
          g += p.g;
          b += p.b;
        }
      }
      for (std::size_t q = 0; q < 4; ++q) luma[q] /= count[q];
      const double n = static_cast<double>((x1 - x0) * (y1 - y0));
      const Rgb mean{static_cast<std::uint8_t>(std::lround(r / n)), static_cast<std::uint8_t>(std::lround(g / n)),
                     static_cast<std::uint8_t>(std::lround(b / n))};

      const auto colors = fuzzy_color(mean);
      for (Texture t : classify_texture(texture_filters(luma[0], luma[1], luma[2], luma[3]))) {
        for (int c = 0; c < kColors; ++c) hist[static_cast<std::size_t>(bin(t, c))] += colors[static_cast<std::size_t>(c)];
      }
    }
  }
  return hist;
}

/// Scales by the largest bin and maps [0, 1] onto 8 equal-width levels.
inline std::vector<float> quantize(const std::array<double, 144>& hist) {
  const double mx = *std::max_element(hist.begin(), hist.end());
  std::vector<float> out(hist.size(), 0.0f);
  if (mx <= 0.0) return out;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double level = std::floor(hist[i] / mx * 8.0);
    out[i] = static_cast<float>(std::clamp(level, 0.0, 7.0));
  }
  return out;
}

}  // namespace evir::cedd

namespace evir {

inline Descriptor extract_cedd(const PixelGrid& img) {
  require_min_size(img, 8, "CEDD");
  return Descriptor(Model::Cedd, cedd::quantize(cedd::raw_histogram(img)));
}

}  // namespace evir
