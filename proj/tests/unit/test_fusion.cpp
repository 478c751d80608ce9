#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "evir/fusion.hpp"

using namespace evir;
using Catch::Approx;

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

RankedList list_of(Model m, std::vector<std::pair<DocId, double>> docs) {
  RankedList l{m, {}};
  for (std::size_t i = 0; i < docs.size(); ++i) l.entries.push_back({docs[i].first, docs[i].second, static_cast<std::uint32_t>(i + 1)});
  return l;
}

NormalizedList norm_of(Model m, std::vector<std::pair<DocId, double>> values, std::size_t n = 50) {
  NormalizedList l{m, {}, n};
  for (auto [d, v] : values) l.entries.push_back({d, v});
  return l;
}

}  // namespace

TEST_CASE("rank normalization values") {
  RankedList l{Model::Cedd, {}};
  for (std::uint32_t r = 1; r <= 10; ++r) l.entries.push_back({r, 1.0 / r, r});
  const NormalizedList n10 = normalize_by_rank(l, 10);
  CHECK(n10.entries[0].value == 1.0);
  CHECK(n10.entries[9].value == Approx(0.1));

  RankedList l50{Model::Acc, {}};
  for (std::uint32_t r = 1; r <= 25; ++r) l50.entries.push_back({r, 1.0 / r, r});
  CHECK(normalize_by_rank(l50, 50).entries[24].value == Approx(0.52));
  CHECK(code_of([&] { (void)normalize_by_rank(l, 9); }) == ErrorCode::RankExceedsN);
}

TEST_CASE("score normalization values") {
  const NormalizedList n = normalize_by_score(list_of(Model::Phog, {{1, 6.0}, {2, 4.0}, {3, 2.0}}));
  CHECK(n.entries[0].value == 1.0);
  CHECK(n.entries[1].value == 0.5);
  CHECK(n.entries[2].value == 0.0);
  CHECK(n.entries[0].doc == 1);

  const NormalizedList eq = normalize_by_score(list_of(Model::Phog, {{1, 0.3}, {2, 0.3}, {3, 0.3}}));
  for (const auto& e : eq.entries) CHECK(e.value == 1.0);
  CHECK(normalize_by_score(list_of(Model::Cedd, {{9, 0.7}})).entries[0].value == 1.0);
  CHECK(code_of([] { (void)normalize_by_score(RankedList{}); }) == ErrorCode::EmptyList);
}

TEST_CASE("sum fusion examples") {
  FusionConfig two{FusionScheme::SumOfScores, 50, {Model::Cedd, Model::Acc}};
  const FusedList f = fuse_sum({norm_of(Model::Cedd, {{4, 0.9}}), norm_of(Model::Acc, {{4, 0.7}})}, two);
  REQUIRE(f.entries.size() == 1);
  CHECK(f.entries[0].score == Approx(1.6));

  FusionConfig three{FusionScheme::SumOfScores, 50, {Model::Cedd, Model::Acc, Model::Phog}};
  const FusedList g = fuse_sum({norm_of(Model::Cedd, {{1, 0.4}}), norm_of(Model::Acc, {}), norm_of(Model::Phog, {{2, 0.3}})}, three);
  REQUIRE(g.entries.size() == 2);
  CHECK(g.entries[0].doc == 1);
  CHECK(g.entries[0].score == 0.4);
  CHECK(g.entries[1].rank == 2);

  CHECK(code_of([&] { (void)fuse_sum({norm_of(Model::Cedd, {})}, three); }) == ErrorCode::ModelSetMismatch);
  CHECK(code_of([&] {
          (void)fuse_sum({norm_of(Model::Cedd, {}), norm_of(Model::Bovw, {}), norm_of(Model::Phog, {})}, three);
        }) == ErrorCode::ModelSetMismatch);
  FusionConfig dup{FusionScheme::SumOfRanks, 50, {Model::Cedd, Model::Cedd}};
  CHECK(code_of([&] { dup.validate(); }) == ErrorCode::ModelSetMismatch);
}

TEST_CASE("fusion is commutative and K = 1 preserves order") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FusionConfig cfg{FusionScheme::SumOfScores, 20, {Model::Cedd, Model::Acc, Model::Phog}};
  for (int t = 0; t < 100; ++t) {
    std::vector<NormalizedList> lists;
    for (Model m : cfg.models) {
      NormalizedList l{m, {}, 20};
      for (DocId d = 0; d < 20; ++d)
        if (rng() % 2) l.entries.push_back({d, u(rng)});
      lists.push_back(l);
    }
    const FusedList base = fuse_sum(lists, cfg);
    std::shuffle(lists.begin(), lists.end(), rng);
    CHECK(fuse_sum(lists, cfg) == base);
    for (const auto& e : base.entries) CHECK(e.score <= 3.0);
  }

  RankedList l{Model::Phog, {}};
  for (std::uint32_t r = 1; r <= 15; ++r) l.entries.push_back({(r * 7) % 15, 1.0 - r * 0.01, r});
  const FusedList one = fuse_sum({normalize_by_rank(l, 15)}, FusionConfig{FusionScheme::SumOfRanks, 15, {Model::Phog}});
  REQUIRE(one.entries.size() == 15);
  for (std::size_t i = 0; i < 15; ++i) CHECK(one.entries[i].doc == l.entries[i].doc);
}

TEST_CASE("bound K is reached only by a unanimous winner") {
  const RankedList a = list_of(Model::Cedd, {{5, 0.9}, {6, 0.5}});
  const RankedList b = list_of(Model::Acc, {{5, 0.8}, {7, 0.2}});
  const RankedList c = list_of(Model::Phog, {{5, 0.4}, {6, 0.3}});
  FusionConfig cfg{FusionScheme::SumOfRanks, 10, {Model::Cedd, Model::Acc, Model::Phog}};
  const FusedList f = fuse_sum({normalize_by_rank(a, 10), normalize_by_rank(b, 10), normalize_by_rank(c, 10)}, cfg);
  CHECK(f.entries[0].doc == 5);
  CHECK(f.entries[0].score == 3.0);
  for (std::size_t i = 1; i < f.entries.size(); ++i) CHECK(f.entries[i].score < 3.0);
}

TEST_CASE("rank normalization ignores scores, score normalization ignores affine maps") {
  std::mt19937_64 rng(202);
  for (int t = 0; t < 200; ++t) {
    const std::size_t len = 1 + rng() % 30;
    std::vector<double> scores(len);
    for (double& s : scores) s = std::ldexp(static_cast<double>(rng() % 4096), -12);
    std::sort(scores.rbegin(), scores.rend());
    RankedList l{Model::Acc, {}};
    for (std::size_t i = 0; i < len; ++i) l.entries.push_back({static_cast<DocId>(i * 3), scores[i], static_cast<std::uint32_t>(i + 1)});

    RankedList other = l;
    for (std::size_t i = 0; i < len; ++i) other.entries[i].score = 100.0 - static_cast<double>(i * i) - 0.5 * i;
    CHECK(normalize_by_rank(other, 40) == normalize_by_rank(l, 40));

    RankedList mapped = l;
    for (RankedEntry& e : mapped.entries) e.score = 8.0 * e.score - 3.25;
    CHECK(normalize_by_score(mapped) == normalize_by_score(l));
    for (RankedEntry& e : mapped.entries) e.score = 0.37 * e.score + 11.0;
    const NormalizedList a = normalize_by_score(mapped);
    const NormalizedList b = normalize_by_score(l);
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(a.entries[i].doc == b.entries[i].doc);
      CHECK(a.entries[i].value == Approx(b.entries[i].value).margin(1e-12));
    }
  }
}
