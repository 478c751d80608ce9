#pragma once

// Search engines over an index:
//   A  rank fusion of CEDD, ACC and PHOG
//   B  score fusion of the same models
//   C  bag of visual words alone

#include <optional>
#include <string>
#include <string_view>

#include "evir/fusion.hpp"

namespace evir {

enum class Engine : std::uint8_t { A, B, C };

constexpr std::string_view to_string(Engine e) noexcept {
  switch (e) {
    case Engine::A: return "A";
    case Engine::B: return "B";
    case Engine::C: return "C";
  }
  return "?";
}

inline std::optional<Engine> parse_engine(std::string_view s) noexcept {
  if (s == "A" || s == "a") return Engine::A;
  if (s == "B" || s == "b") return Engine::B;
  if (s == "C" || s == "c") return Engine::C;
  return std::nullopt;
}

inline FusionConfig fusion_config(Engine e, std::size_t n) {
  FusionConfig c;
  c.n = n;
  c.scheme = e == Engine::B ? FusionScheme::SumOfScores : FusionScheme::SumOfRanks;
  if (e == Engine::C) c.models = {Model::Bovw};
  return c;
}

/// Global descriptor of the query for one model.
inline Descriptor describe_query(const PixelGrid& img, Model m) {
  switch (m) {
    case Model::Cedd: return extract_cedd(img);
    case Model::Acc: return extract_acc(img);
    case Model::Phog: return extract_phog(img);
    case Model::Bovw: break;
  }
  fail(ErrorCode::InvalidArgument, "BoVW queries need a vocabulary");
}

/// Fuses per-model lists already retrieved for a query.
inline FusedList fuse_lists(const std::vector<RankedList>& lists, const FusionConfig& config) {
  std::vector<NormalizedList> normalized;
  for (const RankedList& l : lists) {
    if (l.entries.empty()) {
      normalized.push_back(NormalizedList{l.model, {}, config.n});
    } else if (config.scheme == FusionScheme::SumOfRanks) {
      normalized.push_back(normalize_by_rank(l, config.n));
    } else {
      normalized.push_back(normalize_by_score(l));
    }
  }
  return fuse_sum(normalized, config);
}

/// Engines A and B: search every configured model, normalize, sum.
inline FusedList run_fusion(const Index& idx, const PixelGrid& query, const FusionConfig& config, unsigned threads = 0) {
  config.validate();
  if (idx.empty()) fail(ErrorCode::EmptyIndex, "index holds no frames");
  std::vector<RankedList> lists;
  for (Model m : config.models) lists.push_back(idx.search_model(m, describe_query(query, m), config.n, threads));
  return fuse_lists(lists, config);
}

/// Engine C: BoVW similarity used directly. Frames sharing no visual word with
/// the query are dropped; a query without keypoints yields an empty list.
inline FusedList run_local(const Index& idx, const PixelGrid& query, std::size_t n, unsigned threads = 0) {
  if (idx.empty()) fail(ErrorCode::EmptyIndex, "index holds no frames");
  if (idx.vocabulary().empty()) fail(ErrorCode::VocabularyMissing, "index has no vocabulary");
  const BovwHistogram h = encode_bovw(local_features(query, idx.config().detector), idx.vocabulary());
  FusedList out;
  if (h.raw_count == 0) return out;
  const RankedList list = idx.search_model(Model::Bovw, h.descriptor(), n, threads);
  for (const RankedEntry& e : list.entries) {
    if (e.score > 0.0) out.entries.push_back({e.doc, e.score, e.rank});
  }
  return out;
}

inline FusedList run_engine(const Index& idx, const PixelGrid& query, Engine engine, std::size_t n = 50,
                            unsigned threads = 0) {
  if (engine == Engine::C) return run_local(idx, query, n, threads);
  return run_fusion(idx, query, fusion_config(engine, n), threads);
}

}  // namespace evir
