#pragma once

// Fast-Hessian blob detector: box-filter approximations of the Hessian
// determinant evaluated on an integral image over a multi-octave scale space.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "evir/error.hpp"
#include "evir/imaging.hpp"

namespace evir {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 0.0;  // sigma of the detected blob, px
  double response = 0.0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct DetectorParams {
  float threshold = 0.0008f;
  int octaves = 4;
};

namespace hessian {

inline constexpr int kLayersPerOctave = 4;

/// Box filter side for layer `layer` of octave `octave` (both 0-based):
/// 9, 15, 21, 27 | 15, 27, 39, 51 | 27, 51, 75, 99 | ...
constexpr int filter_size(int octave, int layer) noexcept { return 3 * ((2 << octave) * (layer + 1) + 1); }

constexpr int sample_step(int octave) noexcept { return 1 << octave; }

/// Gaussian sigma equivalent to a box filter of side `size`.
constexpr double sigma_of(double size) noexcept { return 1.2 * size / 9.0; }

/// Determinant-of-Hessian response map for one filter size, sampled every
/// `step` pixels. Pixels outside the image read as zero.
class ResponseLayer {
 public:
  ResponseLayer(const IntegralGrid& ii, int filter, int step)
      : filter_(filter), step_(step), cols_((ii.width() + step - 1) / step), rows_((ii.height() + step - 1) / step),
        det_(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_), 0.0) {
    const int lobe = filter / 3;
    const int border = (filter - 1) / 2;
    const double inv_area = 1.0 / (static_cast<double>(filter) * filter);
    auto box = [&ii](int x0, int y0, int w, int h) { return ii.clipped_sum(x0, y0, x0 + w, y0 + h); };

    for (int r = 0; r < rows_; ++r) {
      const int y = r * step;
      for (int c = 0; c < cols_; ++c) {
        const int x = c * step;
        const double dxx = (box(x - border, y - lobe + 1, filter, 2 * lobe - 1) -
                            3.0 * box(x - lobe / 2, y - lobe + 1, lobe, 2 * lobe - 1)) * inv_area;
        const double dyy = (box(x - lobe + 1, y - border, 2 * lobe - 1, filter) -
                            3.0 * box(x - lobe + 1, y - lobe / 2, 2 * lobe - 1, lobe)) * inv_area;
        const double dxy = (box(x + 1, y - lobe, lobe, lobe) + box(x - lobe, y + 1, lobe, lobe) -
                            box(x - lobe, y - lobe, lobe, lobe) - box(x + 1, y + 1, lobe, lobe)) * inv_area;
        det_[static_cast<std::size_t>(r * cols_ + c)] = dxx * dyy - 0.81 * dxy * dxy;
      }
    }
  }

  [[nodiscard]] int filter() const noexcept { return filter_; }
  [[nodiscard]] int step() const noexcept { return step_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] double at(int c, int r) const noexcept { return det_[static_cast<std::size_t>(r * cols_ + c)]; }

 private:
  int filter_;
  int step_;
  int cols_;
  int rows_;
  std::vector<double> det_;
};

inline bool is_local_max(const std::array<const ResponseLayer*, 3>& stack, int c, int r) noexcept {
  const double v = stack[1]->at(c, r);
  for (const ResponseLayer* layer : stack) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (layer == stack[1] && dr == 0 && dc == 0) continue;
        if (layer->at(c + dc, r + dr) >= v) return false;
      }
    }
  }
  return true;
}

/// Sub-sample refinement by fitting a 3D quadratic around the discrete maximum.
/// Writes the offset (dc, dr, dlayer) and returns true; leaves `offset` alone
/// when the fit is degenerate or the extremum lies outside the sample cell.
inline bool refine(const std::array<const ResponseLayer*, 3>& s, int c, int r, std::array<double, 3>& offset) noexcept {
  const double v = s[1]->at(c, r);
  const double dx = (s[1]->at(c + 1, r) - s[1]->at(c - 1, r)) / 2.0;
  const double dy = (s[1]->at(c, r + 1) - s[1]->at(c, r - 1)) / 2.0;
  const double ds = (s[2]->at(c, r) - s[0]->at(c, r)) / 2.0;

  const double dxx = s[1]->at(c + 1, r) + s[1]->at(c - 1, r) - 2.0 * v;
  const double dyy = s[1]->at(c, r + 1) + s[1]->at(c, r - 1) - 2.0 * v;
  const double dss = s[2]->at(c, r) + s[0]->at(c, r) - 2.0 * v;
  const double dxy = (s[1]->at(c + 1, r + 1) - s[1]->at(c - 1, r + 1) - s[1]->at(c + 1, r - 1) + s[1]->at(c - 1, r - 1)) / 4.0;
  const double dxs = (s[2]->at(c + 1, r) - s[2]->at(c - 1, r) - s[0]->at(c + 1, r) + s[0]->at(c - 1, r)) / 4.0;
  const double dys = (s[2]->at(c, r + 1) - s[2]->at(c, r - 1) - s[0]->at(c, r + 1) + s[0]->at(c, r - 1)) / 4.0;

  // Solve H * o = -g by Cramer's rule.
  const double a = dxx, b = dxy, cc = dxs, d = dyy, e = dys, f = dss;
  const double det = a * (d * f - e * e) - b * (b * f - e * cc) + cc * (b * e - d * cc);
  if (std::fabs(det) < 1e-18) return false;
  const double gx = -dx, gy = -dy, gs = -ds;
  const double ox = (gx * (d * f - e * e) - b * (gy * f - e * gs) + cc * (gy * e - d * gs)) / det;
  const double oy = (a * (gy * f - e * gs) - gx * (b * f - e * cc) + cc * (b * gs - gy * cc)) / det;
  const double os = (a * (d * gs - gy * e) - b * (b * gs - gy * cc) + gx * (b * e - d * cc)) / det;
  if (std::fabs(ox) >= 0.5 || std::fabs(oy) >= 0.5 || std::fabs(os) >= 0.5) return false;
  offset = {ox, oy, os};
  return true;
}

}  // namespace hessian

/// Detects blob-like keypoints, strongest first. `threshold` applies to the
/// determinant response of luma scaled to [0, 1].
inline std::vector<Keypoint> detect_keypoints(const LumaGrid& luma, double threshold, int octaves) {
  if (luma.width() < 32 || luma.height() < 32) {
    fail(ErrorCode::ImageTooSmall, "keypoint detection needs at least 32x32");
  }
  if (octaves < 1) fail(ErrorCode::InvalidArgument, "octaves must be >= 1");
  if (!(threshold > 0.0)) fail(ErrorCode::InvalidArgument, "threshold must be > 0");

  LumaGrid unit(luma.width(), luma.height());
  for (int y = 0; y < luma.height(); ++y) {
    for (int x = 0; x < luma.width(); ++x) unit.at(x, y) = luma.at(x, y) / 255.0;
  }
  const IntegralGrid ii(unit);

  std::vector<Keypoint> out;
  for (int o = 0; o < octaves; ++o) {
    const int step = hessian::sample_step(o);
    std::vector<hessian::ResponseLayer> layers;
    layers.reserve(hessian::kLayersPerOctave);
    for (int i = 0; i < hessian::kLayersPerOctave; ++i) layers.emplace_back(ii, hessian::filter_size(o, i), step);
    const int cols = layers[0].cols();
    const int rows = layers[0].rows();
    if (cols < 3 || rows < 3) break;

    for (int i = 1; i + 1 < hessian::kLayersPerOctave; ++i) {
      const std::array<const hessian::ResponseLayer*, 3> stack = {&layers[static_cast<std::size_t>(i - 1)],
                                                                 &layers[static_cast<std::size_t>(i)],
                                                                 &layers[static_cast<std::size_t>(i + 1)]};
      const double filter_gap = layers[static_cast<std::size_t>(i + 1)].filter() - layers[static_cast<std::size_t>(i)].filter();
      // Skip samples whose largest filter would reach past the image edge.
      const int border = std::max(1, (stack[2]->filter() + 1) / (2 * step));
      for (int r = border; r + border < rows; ++r) {
        for (int c = border; c + border < cols; ++c) {
          const double v = stack[1]->at(c, r);
          if (v <= threshold || !hessian::is_local_max(stack, c, r)) continue;

          std::array<double, 3> off{0.0, 0.0, 0.0};
          hessian::refine(stack, c, r, off);
          Keypoint kp;
          kp.x = std::clamp((c + off[0]) * step, 0.0, luma.width() - 1.0);
          kp.y = std::clamp((r + off[1]) * step, 0.0, luma.height() - 1.0);
          kp.scale = hessian::sigma_of(stack[1]->filter() + off[2] * filter_gap);
          kp.response = v;
          out.push_back(kp);
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  return out;
}

inline std::vector<Keypoint> detect_keypoints(const LumaGrid& luma, const DetectorParams& params = {}) {
  return detect_keypoints(luma, params.threshold, params.octaves);
}

}  // namespace evir
