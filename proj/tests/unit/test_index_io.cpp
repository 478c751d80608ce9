#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "evir/index_io.hpp"
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

TEST_CASE("round trip keeps search results bit-identical") {
  Index idx = fixtures::random_index(300, 6, 91);
  idx.set_video_duration("v2", 120.5f);
  const Bytes file = serialize_index(idx);
  const Index back = deserialize_index(file);

  CHECK(back.config() == idx.config());
  CHECK(back.frames() == idx.frames());
  CHECK(back.videos() == idx.videos());
  CHECK(back.cedd_table() == idx.cedd_table());
  for (Model m : {Model::Acc, Model::Phog, Model::Bovw}) CHECK(back.float_table(m) == idx.float_table(m));
  CHECK(serialize_index(back) == file);

  std::mt19937_64 rng(92);
  for (int q = 0; q < 50; ++q) {
    const FrameDescriptors d = fixtures::random_descriptors(rng);
    for (Model m : kAllModels) CHECK(back.search_model(m, d.get(m), 50) == idx.search_model(m, d.get(m), 50));
  }
}

TEST_CASE("vocabulary and frame sources survive the round trip") {
  Index idx;
  idx.set_vocabulary(fixtures::random_vocabulary(3));
  std::mt19937_64 rng(93);
  idx.add_frame(make_frame_ref("clip", 0, 5.0), fixtures::blocks(80, 60, rng), "/frames/clip/0001.png");
  const Index back = deserialize_index(serialize_index(idx));
  CHECK(back.vocabulary() == idx.vocabulary());
  CHECK(back.frame(0).source == "/frames/clip/0001.png");
  CHECK(back.frame(0).width == 80);
}

TEST_CASE("empty index round trips") {
  const Index empty;
  const Index back = deserialize_index(serialize_index(empty));
  CHECK(back.empty());
  CHECK(back.vocabulary().empty());
}

TEST_CASE("corruption is detected") {
  const Index idx = fixtures::random_index(40, 3, 94);
  const Bytes file = serialize_index(idx);

  Bytes truncated(file.begin(), file.end() - 100);
  CHECK(code_of([&] { (void)deserialize_index(truncated); }) == ErrorCode::ChecksumMismatch);
  CHECK(code_of([&] { (void)deserialize_index(Bytes(file.begin(), file.begin() + 8)); }) == ErrorCode::ChecksumMismatch);

  std::mt19937_64 rng(95);
  for (int i = 0; i < 50; ++i) {
    Bytes flipped = file;
    const std::size_t pos = 6 + rng() % (file.size() - 6);
    flipped[pos] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    CHECK(code_of([&] { (void)deserialize_index(flipped); }) == ErrorCode::ChecksumMismatch);
  }

  Bytes version = file;
  version[4] = 9;
  CHECK(code_of([&] { (void)deserialize_index(version); }) == ErrorCode::FormatVersionMismatch);
  Bytes magic = file;
  magic[0] = 'X';
  CHECK(code_of([&] { (void)deserialize_index(magic); }) == ErrorCode::FormatVersionMismatch);
}

TEST_CASE("file layout") {
  const Bytes file = serialize_index(Index{});
  REQUIRE(file.size() > 10);
  CHECK(std::string(file.begin(), file.begin() + 4) == "EVIR");
  CHECK(file[4] == 1);
  CHECK(file[5] == 0);
  // Sampling fps 5.0f little-endian right after the version.
  CHECK(file[6] == 0x00);
  CHECK(file[9] == 0x40);
  CHECK(file[8] == 0xA0);
}

TEST_CASE("files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "evir_io_test";
  std::filesystem::create_directories(dir);
  const Index idx = fixtures::random_index(10, 2, 96);
  persist(idx, dir / "i.evir");
  CHECK(load_index(dir / "i.evir").frames() == idx.frames());
  CHECK(code_of([&] { (void)load_index(dir / "missing.evir"); }) == ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("standalone vocabulary files") {
  const Vocabulary v = fixtures::random_vocabulary(4);
  const Bytes b = serialize_vocabulary(v);
  CHECK(deserialize_vocabulary(b) == v);
  Bytes bad = b;
  bad[20] ^= 0xFF;
  CHECK(code_of([&] { (void)deserialize_vocabulary(bad); }) == ErrorCode::ChecksumMismatch);
  CHECK(code_of([&] { (void)deserialize_vocabulary(serialize_index(Index{})); }) == ErrorCode::Malformed);
}
