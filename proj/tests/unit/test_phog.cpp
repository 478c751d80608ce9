#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "evir/phog.hpp"
#include "fixtures.hpp"

using namespace evir;
using Catch::Approx;

namespace {
double sum_range(const Descriptor& d, int from, int to) {
  double s = 0.0;
  for (int i = from; i < to; ++i) s += d[static_cast<std::size_t>(i)];
  return s;
}
}  // namespace

TEST_CASE("phog soft binning") {
  const auto zero = phog::soft_bin(0.0);
  CHECK(zero.lower == 0);
  CHECK(zero.upper_weight == 0.0);
  const auto mid = phog::soft_bin(18.0);
  CHECK(mid.lower == 1);
  CHECK(mid.upper == 2);
  CHECK(mid.upper_weight == Approx(0.5));
  const auto wrap = phog::soft_bin(354.0);
  CHECK(wrap.lower == 29);
  CHECK(wrap.upper == 0);
  CHECK(wrap.upper_weight == Approx(0.5));
  CHECK(phog::level_offset(1) == 30);
  CHECK(phog::level_offset(2) == 150);
}

TEST_CASE("phog of a uniform image is all zero") {
  const Descriptor d = extract_phog(fixtures::uniform(20, 20, {90, 10, 200}));
  for (float v : d.values()) CHECK(v == 0.0f);
}

TEST_CASE("phog of a vertical step edge") {
  PixelGrid img(8, 8, Rgb{255, 255, 255});
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 4; ++x) img.at(x, y) = {0, 0, 0};

  // Sobel: columns 3 and 4 see gx = 255 * (1 + 2 + 1) = 1020, gy = 0, so the
  // orientation is 0 degrees (bin 0) and every other pixel is flat.
  const auto grads = phog::sobel(to_grayscale(img));
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const auto& g = grads[static_cast<std::size_t>(y * 8 + x)];
      if (x == 3 || x == 4) {
        CHECK(g.magnitude == Approx(1020.0));
        CHECK(g.orientation == 0.0);
      } else {
        CHECK(g.magnitude == 0.0);
      }
    }
  }

  const Descriptor d = extract_phog(img);
  std::vector<std::pair<int, double>> expected;
  expected.emplace_back(0, 1.0 / 3.0);
  // Level 1: 2x2 cells, x = 3 in column 0 and x = 4 in column 1, both rows.
  for (int cell = 0; cell < 4; ++cell) expected.emplace_back(30 + cell * 30, 1.0 / 12.0);
  // Level 2: 4x4 cells, columns 1 and 2 of every row.
  for (int row = 0; row < 4; ++row) {
    expected.emplace_back(150 + (row * 4 + 1) * 30, 1.0 / 24.0);
    expected.emplace_back(150 + (row * 4 + 2) * 30, 1.0 / 24.0);
  }
  std::vector<double> want(630, 0.0);
  for (auto [i, v] : expected) want[static_cast<std::size_t>(i)] = v;
  for (std::size_t i = 0; i < 630; ++i) CHECK(d[i] == Approx(want[i]).margin(1e-7));
}

TEST_CASE("phog is L1 normalized with equal mass per pyramid level") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 40; ++i) {
    const PixelGrid img = fixtures::random_image(rng);
    const Descriptor d = extract_phog(img);
    const double total = sum_range(d, 0, 630);
    if (total == 0.0) continue;
    CHECK(total == Approx(1.0).margin(1e-6));
    CHECK(sum_range(d, 0, 30) == Approx(1.0 / 3.0).margin(1e-6));
    CHECK(sum_range(d, 30, 150) == Approx(1.0 / 3.0).margin(1e-6));
    CHECK(sum_range(d, 150, 630) == Approx(1.0 / 3.0).margin(1e-6));

    // Level-0 mass is global, so shuffling rows keeps it at one third.
    PixelGrid shuffled = img;
    std::vector<int> rows(static_cast<std::size_t>(img.height()));
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) shuffled.at(x, y) = img.at(x, rows[static_cast<std::size_t>(y)]);
    const Descriptor s = extract_phog(shuffled);
    if (sum_range(s, 0, 630) > 0.0) CHECK(sum_range(s, 0, 30) == Approx(1.0 / 3.0).margin(1e-6));
    CHECK(extract_phog(img) == d);
  }
}
