#pragma once

// Localized CEDD: one CEDD vector per detected keypoint, computed on a patch
// whose size follows the keypoint's scale.

#include <algorithm>
#include <cmath>
#include <vector>

#include "evir/cedd.hpp"
#include "evir/descriptor.hpp"
#include "evir/imaging.hpp"
#include "evir/keypoints.hpp"

namespace evir {

struct LocalDescriptor {
  Keypoint keypoint;
  Descriptor values{Model::Cedd};
};

namespace patch {

inline constexpr double kSidePerSigma = 10.0;
inline constexpr int kMinSide = 16;
inline constexpr int kMaxSide = 128;
inline constexpr int kOutputSide = 40;

/// Pre-resize side of the square patch for a keypoint of the given scale.
inline int side_for_scale(double scale) noexcept {
  const long side = std::lround(kSidePerSigma * scale);
  return static_cast<int>(std::clamp(side, static_cast<long>(kMinSide), static_cast<long>(kMaxSide)));
}

struct Window {
  int x0, y0, x1, y1;  // half-open, already clipped to the image
};

inline Window window_for(const PixelGrid& img, const Keypoint& kp) noexcept {
  const int side = side_for_scale(kp.scale);
  const int left = static_cast<int>(std::lround(kp.x - side / 2.0));
  const int top = static_cast<int>(std::lround(kp.y - side / 2.0));
  Window w{std::max(left, 0), std::max(top, 0), std::min(left + side, img.width()), std::min(top + side, img.height())};
  // A keypoint inside the image always keeps at least its own pixel.
  const int cx = std::clamp(static_cast<int>(kp.x), 0, img.width() - 1);
  const int cy = std::clamp(static_cast<int>(kp.y), 0, img.height() - 1);
  if (w.x1 <= w.x0) { w.x0 = cx; w.x1 = cx + 1; }
  if (w.y1 <= w.y0) { w.y0 = cy; w.y1 = cy + 1; }
  return w;
}

}  // namespace patch

inline PixelGrid extract_patch(const PixelGrid& img, const Keypoint& kp) {
  const patch::Window w = patch::window_for(img, kp);
  return resize(crop(img, w.x0, w.y0, w.x1, w.y1), patch::kOutputSide, patch::kOutputSide);
}

inline std::vector<LocalDescriptor> describe_local(const PixelGrid& img, const std::vector<Keypoint>& keypoints) {
  std::vector<LocalDescriptor> out;
  out.reserve(keypoints.size());
  for (const Keypoint& kp : keypoints) out.push_back({kp, extract_cedd(extract_patch(img, kp))});
  return out;
}

}  // namespace evir
