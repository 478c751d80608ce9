#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <thread>

#include "evir/index.hpp"
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

/// Exhaustive scoring and full sort, written independently of the index scan.
std::vector<std::pair<DocId, double>> brute_force(const Index& idx, Model m, const Descriptor& q) {
  std::vector<std::pair<DocId, double>> all;
  for (DocId d = 0; d < idx.size(); ++d) {
    const Descriptor stored = idx.descriptor(m, d);
    double s = 0.0;
    if (m == Model::Bovw) {
      s = cosine_similarity<float, float>(q.values(), stored.values());
    } else {
      s = 1.0 / (1.0 + descriptor_distance(q, stored, idx.config().metric_for(m)));
    }
    all.emplace_back(d, s);
  }
  std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.second > b.second || (a.second == b.second && a.first < b.first); });
  return all;
}

}  // namespace

TEST_CASE("frames get dense ids") {
  Index idx;
  idx.set_vocabulary(fixtures::random_vocabulary(1));
  std::mt19937_64 rng(81);
  CHECK(idx.add_frame(make_frame_ref("a", 0, 5.0), fixtures::blocks(64, 48, rng)) == 0);
  CHECK(idx.add_frame(make_frame_ref("a", 1, 5.0), fixtures::blocks(64, 48, rng)) == 1);
  CHECK(idx.add_frame(make_frame_ref("b", 0, 5.0), fixtures::blocks(64, 48, rng)) == 2);
  CHECK(code_of([&] { idx.add_frame(make_frame_ref("a", 1, 5.0), fixtures::blocks(64, 48, rng)); }) ==
        ErrorCode::DuplicateFrame);
  CHECK(idx.size() == 3);
  CHECK(idx.cedd_table().size() == 3 * 144);
  CHECK(idx.float_table(Model::Acc).size() == 3 * 256);
  CHECK(idx.float_table(Model::Phog).size() == 3 * 630);
  CHECK(idx.float_table(Model::Bovw).size() == 3 * 512);
  CHECK(idx.find_frame("a", 1) == DocId{1});
  CHECK_FALSE(idx.find_frame("c", 0).has_value());
  REQUIRE(idx.find_video("a") != nullptr);
  CHECK(idx.find_video("a")->frame_count == 2);
  CHECK(idx.find_video("a")->duration == 0.4f);
  CHECK(idx.frame(1).ref.timestamp == 0.2);
}

TEST_CASE("frames need a vocabulary") {
  Index idx;
  std::mt19937_64 rng(82);
  CHECK(code_of([&] { idx.add_frame(make_frame_ref("a", 0, 5.0), fixtures::blocks(64, 48, rng)); }) ==
        ErrorCode::VocabularyMissing);
  CHECK(code_of([&] { idx.set_vocabulary(Vocabulary(2, 144, std::vector<float>(288), 0, 0)); }) ==
        ErrorCode::ModelMismatch);
}

TEST_CASE("search self match and truncation") {
  const Index idx = fixtures::random_index(100, 7, 83);
  for (Model m : kAllModels) {
    const RankedList r = idx.search_model(m, idx.descriptor(m, 7), 3);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].doc == 7);
    CHECK(r.entries[0].score == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.entries[0].rank == 1);
    CHECK(r.entries[2].rank == 3);
  }
  CHECK(code_of([&] { (void)idx.search_model(Model::Cedd, idx.descriptor(Model::Acc, 0), 3); }) ==
        ErrorCode::ModelMismatch);
  const Index empty;
  CHECK(code_of([&] { (void)empty.search_model(Model::Cedd, Descriptor(Model::Cedd), 3); }) == ErrorCode::EmptyIndex);
}

TEST_CASE("search order equals exhaustive scoring") {
  const Index idx = fixtures::random_index(20, 4, 84);
  std::mt19937_64 rng(85);
  for (int q = 0; q < 10; ++q) {
    const FrameDescriptors query = fixtures::random_descriptors(rng);
    for (Model m : kAllModels) {
      const auto oracle = brute_force(idx, m, query.get(m));
      const RankedList r = idx.search_model(m, query.get(m), 20);
      REQUIRE(r.entries.size() == 20);
      for (std::size_t i = 0; i < 20; ++i) {
        CHECK(r.entries[i].doc == oracle[i].first);
        CHECK(r.entries[i].score == oracle[i].second);
        CHECK(r.entries[i].rank == i + 1);
      }
    }
  }
}

TEST_CASE("ties resolve to the lower DocId") {
  Index idx;
  std::mt19937_64 rng(86);
  const FrameDescriptors d = fixtures::random_descriptors(rng);
  for (std::uint32_t i = 0; i < 5; ++i) idx.add_descriptors(FrameRecord{make_frame_ref("v", i, 5.0), 8, 8, {}}, d);
  const RankedList r = idx.search_model(Model::Phog, d.phog, 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r.entries[i].doc == i);
}

TEST_CASE("parallel scan matches serial scan") {
  const Index idx = fixtures::random_index(20000, 10, 87);
  std::mt19937_64 rng(88);
  const FrameDescriptors q = fixtures::random_descriptors(rng);
  for (Model m : kAllModels) {
    const RankedList serial = idx.search_model(m, q.get(m), 50, 1);
    CHECK(idx.search_model(m, q.get(m), 50, 4) == serial);

    std::vector<RankedList> results(4);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < 4; ++t) pool.emplace_back([&, t] { results[t] = idx.search_model(m, q.get(m), 50, 2); });
    for (auto& th : pool) th.join();
    for (const auto& r : results) CHECK(r == serial);
  }
}
