#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "corpus.hpp"

using namespace evir;

namespace {

double mean_luma(const PixelGrid& img) {
  double s = 0.0;
  for (const Rgb& p : img.pixels()) s += luma_of(p);
  return s / static_cast<double>(img.pixels().size());
}

}  // namespace

TEST_CASE("videos render deterministically at the configured size") {
  const SynthConfig cfg = fixtures::small_synth();
  const auto a = synth::render_video(cfg, 1);
  const auto b = synth::render_video(cfg, 1);
  REQUIRE(a.size() == 10);
  CHECK(a.front().width() == 160);
  CHECK(a.front().height() == 120);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("videos differ from each other and frames drift within a video") {
  const SynthConfig cfg = fixtures::small_synth();
  const auto v0 = synth::render_video(cfg, 0);
  const auto v1 = synth::render_video(cfg, 1);
  CHECK_FALSE(v0[0] == v1[0]);
  std::set<std::pair<int, int>> origins;
  for (int i = 0; i < cfg.frames; ++i) origins.insert(synth::frame_origin(cfg, i));
  CHECK(origins.size() == static_cast<std::size_t>(cfg.frames));
  CHECK_FALSE(v0[0] == v0[1]);
  // Consecutive frames are crops of one scene: the overlap matches exactly.
  const auto [x0, y0] = synth::frame_origin(cfg, 0);
  const auto [x1, y1] = synth::frame_origin(cfg, 1);
  const int dx = x1 - x0;
  const int dy = y1 - y0;
  for (int y = std::max(0, dy); y < std::min(cfg.height, cfg.height + dy); y += 7) {
    for (int x = std::max(0, dx); x < cfg.width; x += 7) CHECK(v0[0].at(x, y) == v0[1].at(x - dx, y - dy));
  }
}

TEST_CASE("query frames are distinct and in range") {
  SynthConfig cfg;
  for (int v = 0; v < cfg.videos; ++v) {
    const auto q = synth::query_frames(cfg, v);
    REQUIRE(q.size() == 5);
    CHECK(std::set<int>(q.begin(), q.end()).size() == 5);
    for (int f : q) CHECK((f >= 0 && f < cfg.frames));
  }
}

TEST_CASE("corpus layout on disk") {
  const auto& c = fixtures::small_corpus();
  const SynthConfig cfg = fixtures::small_synth();
  CHECK(c.files.frames == 40);
  CHECK(c.files.queries == 8);

  const CorpusManifest m = load_manifest(c.files.manifest);
  REQUIRE(m.records.size() == 4);
  CHECK(m.records[2].video_id == "vid02");
  CHECK(m.records[2].duration_hint == 2.0);
  CHECK(list_images(m.records[2].source).size() == 10);
  CHECK(list_images(m.records[2].source)[3].filename() == "frame_0003.png");

  const GroundTruth gt = load_ground_truth(c.files.ground_truth);
  CHECK(gt.video_of.size() == 8);
  const auto exact = load_queries(c.files.exact_queries);
  const auto near = load_queries(c.files.near_queries);
  REQUIRE(exact.size() == 8);
  REQUIRE(near.size() == 8);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(exact[i].id == near[i].id);
    const std::string& vid = gt.video_of.at(exact[i].id);
    const int video = std::stoi(vid.substr(3));
    const int frame = std::stoi(exact[i].id.substr(exact[i].id.size() - 4));
    CHECK(exact[i].id == synth_query_id(video, frame));
    // Exact queries are the stored frames themselves.
    CHECK(exact[i].image == load_image(m.records[static_cast<std::size_t>(video)].source /
                                       ("frame_" + exact[i].id.substr(exact[i].id.size() - 4) + ".png")));
    // Near duplicates keep the size and stay within the brightness jitter plus coding noise.
    CHECK(near[i].image.width() == cfg.width);
    CHECK(near[i].image.height() == cfg.height);
    const double ratio = mean_luma(near[i].image) / mean_luma(exact[i].image);
    CHECK(ratio > 0.93);
    CHECK(ratio < 1.07);
    CHECK_FALSE(near[i].image == exact[i].image);
  }
}

TEST_CASE("generator configuration checks") {
  SynthConfig cfg;
  cfg.width = 16;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SynthConfig{};
  cfg.queries_per_video = cfg.frames + 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SynthConfig{};
  cfg.jpeg_quality = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_NOTHROW(SynthConfig{}.validate());
}
