#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "evir/bovw.hpp"

using namespace evir;
using Catch::Approx;

namespace {

LocalDescriptor local(std::vector<float> values) {
  values.resize(144, 0.0f);
  return {Keypoint{1, 1, 2, 1}, Descriptor(Model::Cedd, std::move(values))};
}

Vocabulary two_words() {
  std::vector<float> c(2 * 144, 0.0f);
  c[0] = 7.0f;         // word 0: bin 0 at 7
  c[144 + 1] = 7.0f;   // word 1: bin 1 at 7
  return Vocabulary(2, 144, c, 0, 0);
}

}  // namespace

TEST_CASE("hand-built two word vocabulary") {
  const Vocabulary v = two_words();
  const std::vector<LocalDescriptor> descs = {local({6}), local({0, 5}), local({7, 1})};
  const BovwHistogram h = encode_bovw(descs, v);
  CHECK(h.term_counts == std::vector<std::uint32_t>{2, 1});
  CHECK(h.raw_count == 3);
  CHECK(h.weights[0] == Approx(2.0 / std::sqrt(5.0)));
  CHECK(h.weights[1] == Approx(1.0 / std::sqrt(5.0)));

  // Equidistant from both words: the lower index wins.
  CHECK(assign_word(local({3.5f, 3.5f}).values.values(), v) == 0);
}

TEST_CASE("empty input gives an all-zero histogram") {
  const BovwHistogram h = encode_bovw({}, two_words());
  CHECK(h.raw_count == 0);
  for (float w : h.weights) CHECK(w == 0.0f);
  CHECK_THROWS_AS(encode_bovw({}, Vocabulary{}), Error);
}

TEST_CASE("encoding conserves mass and normalizes") {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> val(0, 7);
  std::vector<float> cents(16 * 144);
  for (float& c : cents) c = static_cast<float>(val(rng));
  const Vocabulary v(16, 144, cents, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LocalDescriptor> descs;
    const int m = static_cast<int>(rng() % 40);
    for (int i = 0; i < m; ++i) {
      std::vector<float> x(144);
      for (float& f : x) f = static_cast<float>(val(rng));
      descs.push_back(local(x));
    }
    const BovwHistogram h = encode_bovw(descs, v);
    std::uint64_t total = 0;
    for (auto c : h.term_counts) total += c;
    CHECK(total == static_cast<std::uint64_t>(m));
    double norm = 0.0;
    for (float w : h.weights) norm += static_cast<double>(w) * w;
    if (m > 0) CHECK(std::sqrt(norm) == Approx(1.0).margin(1e-6));
    if (m > 0) CHECK(bovw_similarity(h, h) == Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("cosine similarity examples") {
  std::vector<float> a(512, 0.0f), b(512, 0.0f), c(512, 0.0f);
  a[0] = a[1] = 1.0f;
  b[0] = b[2] = 1.0f;
  c[3] = 1.0f;
  CHECK(cosine_similarity<float, float>(a, b) == Approx(0.5));
  CHECK(cosine_similarity<float, float>(a, c) == 0.0);
  CHECK(cosine_similarity<float, float>(a, std::vector<float>(512, 0.0f)) == 0.0);
}
