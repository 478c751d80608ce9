#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "evir/codec.hpp"
#include "fixtures.hpp"

using namespace evir;

namespace {
ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("png round trip is lossless") {
  const PixelGrid four(2, 2, std::vector<Rgb>{{255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {12, 34, 56}});
  const PixelGrid back = decode_image(encode_png(four));
  CHECK(back == four);

  const PixelGrid white = decode_image(encode_png(fixtures::uniform(1, 1, {255, 255, 255})));
  CHECK(white.width() == 1);
  CHECK(white.height() == 1);
  CHECK(white.at(0, 0) == Rgb{255, 255, 255});

  std::mt19937_64 rng(3);
  const PixelGrid img = fixtures::noise(31, 17, rng);
  const PixelGrid once = decode_image(encode_png(img));
  const PixelGrid twice = decode_image(encode_png(once));
  CHECK(once == img);
  CHECK(twice == once);
}

TEST_CASE("jpeg decodes with original dimensions") {
  std::mt19937_64 rng(4);
  const PixelGrid img = fixtures::blocks(40, 24, rng);
  const Bytes jpg = encode_jpeg(img, 90);
  CHECK(sniff_format(jpg) == ImageFormat::Jpeg);
  const PixelGrid back = decode_image(jpg);
  CHECK(back.width() == 40);
  CHECK(back.height() == 24);
  CHECK(decode_image(jpg) == back);
}

TEST_CASE("malformed payloads are rejected") {
  std::mt19937_64 rng(5);
  const Bytes jpg = encode_jpeg(fixtures::noise(64, 64, rng), 75);
  const Bytes truncated(jpg.begin(), jpg.begin() + static_cast<std::ptrdiff_t>(jpg.size() / 2));
  CHECK(code_of([&] { (void)decode_image(truncated); }) == ErrorCode::DecodeError);

  const Bytes png = encode_png(fixtures::noise(16, 16, rng));
  const Bytes cut(png.begin(), png.begin() + 40);
  CHECK(code_of([&] { (void)decode_image(cut); }) == ErrorCode::DecodeError);

  const std::string text = "hello, this is not an image";
  const Bytes txt(text.begin(), text.end());
  CHECK(code_of([&] { (void)decode_image(txt); }) == ErrorCode::UnsupportedFormat);
  CHECK(code_of([&] { (void)decode_image(Bytes{}); }) == ErrorCode::DecodeError);
}
