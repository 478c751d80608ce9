#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "evir/acc.hpp"
#include "fixtures.hpp"

using namespace evir;
using Catch::Approx;

namespace {

/// Independent enumeration: scan the full (2d+1)^2 window and keep offsets
/// with chessboard norm exactly d.
std::vector<double> acc_oracle(const PixelGrid& img) {
  const int w = img.width();
  const int h = img.height();
  auto colour = [&](int x, int y) {
    const Rgb p = img.at(x, y);
    return (p.r / 64) * 16 + (p.g / 64) * 4 + p.b / 64;
  };
  const int dists[4] = {1, 3, 5, 7};
  std::vector<double> sum(256, 0.0), n(256, 0.0);
  for (int k = 0; k < 4; ++k) {
    const int d = dists[k];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int c = colour(x, y);
        int in = 0, same = 0;
        for (int dy = -d; dy <= d; ++dy) {
          for (int dx = -d; dx <= d; ++dx) {
            if (std::max(std::abs(dx), std::abs(dy)) != d) continue;
            const int px = x + dx, py = y + dy;
            if (px < 0 || py < 0 || px >= w || py >= h) continue;
            ++in;
            if (colour(px, py) == c) ++same;
          }
        }
        if (in == 0) continue;
        sum[static_cast<std::size_t>(c * 4 + k)] += static_cast<double>(same) / in;
        n[static_cast<std::size_t>(c * 4 + k)] += 1.0;
      }
    }
  }
  for (std::size_t i = 0; i < 256; ++i) sum[i] = n[i] > 0 ? sum[i] / n[i] : 0.0;
  return sum;
}

}  // namespace

TEST_CASE("acc color quantization") {
  CHECK(acc::quantize({0, 0, 0}) == 0);
  CHECK(acc::quantize({255, 0, 0}) == 48);
  CHECK(acc::quantize({255, 255, 255}) == 63);
  CHECK(acc::quantize({64, 127, 128}) == 16 + 4 + 2);
}

TEST_CASE("acc of a uniform image") {
  const Descriptor d = extract_acc(fixtures::uniform(16, 12, {255, 0, 0}));
  int ones = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i / 4 == 48) {
      CHECK(d[i] == 1.0f);
      ++ones;
    } else {
      CHECK(d[i] == 0.0f);
    }
  }
  CHECK(ones == 4);
}

TEST_CASE("acc of vertical stripes matches exhaustive counting") {
  PixelGrid img(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = x % 2 == 0 ? Rgb{255, 0, 0} : Rgb{0, 0, 255};
  const Descriptor d = extract_acc(img);
  const auto oracle = acc_oracle(img);
  for (std::size_t i = 0; i < 256; ++i) CHECK(d[i] == Approx(oracle[i]).margin(1e-6));

  // Absent colors stay zero.
  for (int k = 0; k < 4; ++k) CHECK(d[static_cast<std::size_t>(acc::entry(0, static_cast<std::size_t>(k)))] == 0.0f);
  // Odd distances always land on the other stripe horizontally, so only the
  // ring's own column (2 of 8 interior offsets at d = 1) matches.
  CHECK(d[acc::entry(48, 0)] > 0.0f);
  CHECK(d[acc::entry(48, 0)] < 0.5f);
}

TEST_CASE("acc matches the oracle on random images") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const PixelGrid img = fixtures::random_image(rng);
    const Descriptor d = extract_acc(img);
    const auto oracle = acc_oracle(img);
    for (std::size_t j = 0; j < 256; ++j) {
      CHECK(d[j] >= 0.0f);
      CHECK(d[j] <= 1.0f);
      CHECK(d[j] == Approx(oracle[j]).margin(1e-6));
    }
  }
}
