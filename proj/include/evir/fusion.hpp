#pragma once

// Late fusion of per-model ranked lists: normalize by rank or by score, then
// sum across models.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evir/index.hpp"

namespace evir {

enum class FusionScheme : std::uint8_t { SumOfRanks, SumOfScores };

struct NormalizedEntry {
  DocId doc = 0;
  double value = 0.0;

  friend bool operator==(const NormalizedEntry&, const NormalizedEntry&) = default;
};

struct NormalizedList {
  Model model = Model::Cedd;
  std::vector<NormalizedEntry> entries;
  std::size_t n = 0;  // truncation length

  friend bool operator==(const NormalizedList&, const NormalizedList&) = default;
};

struct FusionConfig {
  FusionScheme scheme = FusionScheme::SumOfRanks;
  std::size_t n = 50;
  std::vector<Model> models{kGlobalModels.begin(), kGlobalModels.end()};

  void validate() const {
    if (n < 1) fail(ErrorCode::InvalidArgument, "N must be >= 1");
    if (models.empty()) fail(ErrorCode::ModelSetMismatch, "fusion needs at least one model");
    const std::set<Model> distinct(models.begin(), models.end());
    if (distinct.size() != models.size()) fail(ErrorCode::ModelSetMismatch, "fusion models must be distinct");
  }
};

struct FusedEntry {
  DocId doc = 0;
  double score = 0.0;
  std::uint32_t rank = 0;

  friend bool operator==(const FusedEntry&, const FusedEntry&) = default;
};

struct FusedList {
  std::vector<FusedEntry> entries;

  friend bool operator==(const FusedList&, const FusedList&) = default;
};

/// (N + 1 - rank) / N for every entry.
inline NormalizedList normalize_by_rank(const RankedList& list, std::size_t n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "N must be >= 1");
  NormalizedList out{list.model, {}, n};
  out.entries.reserve(list.entries.size());
  for (const RankedEntry& e : list.entries) {
    if (e.rank < 1 || e.rank > n) {
      fail(ErrorCode::RankExceedsN, "rank " + std::to_string(e.rank) + " outside 1.." + std::to_string(n));
    }
    out.entries.push_back({e.doc, static_cast<double>(n + 1 - e.rank) / static_cast<double>(n)});
  }
  return out;
}

/// (score - min) / (max - min); every entry is 1 when all scores are equal.
inline NormalizedList normalize_by_score(const RankedList& list) {
  if (list.entries.empty()) fail(ErrorCode::EmptyList, "cannot normalize an empty list");
  double lo = list.entries.front().score;
  double hi = lo;
  for (const RankedEntry& e : list.entries) {
    lo = std::min(lo, e.score);
    hi = std::max(hi, e.score);
  }
  NormalizedList out{list.model, {}, list.entries.size()};
  out.entries.reserve(list.entries.size());
  const double span = hi - lo;
  for (const RankedEntry& e : list.entries) {
    out.entries.push_back({e.doc, span > 0.0 ? std::clamp((e.score - lo) / span, 0.0, 1.0) : 1.0});
  }
  return out;
}

/// Orders fused entries by score descending, DocId ascending, and numbers them.
inline void assign_ranks(std::vector<FusedEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const FusedEntry& a, const FusedEntry& b) { return ranks_before(a.score, a.doc, b.score, b.doc); });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<std::uint32_t>(i + 1);
}

/// Sums normalized values per document over the union of all lists; a model
/// that did not return a document contributes 0. Models are summed in tag
/// order so the result does not depend on the order of `lists`.
inline FusedList fuse_sum(const std::vector<NormalizedList>& lists, const FusionConfig& config) {
  config.validate();
  if (lists.size() != config.models.size()) fail(ErrorCode::ModelSetMismatch, "one list per configured model");
  std::vector<const NormalizedList*> ordered;
  for (const NormalizedList& l : lists) {
    if (std::find(config.models.begin(), config.models.end(), l.model) == config.models.end()) {
      fail(ErrorCode::ModelSetMismatch, std::string(to_string(l.model)) + " is not a configured model");
    }
    if (l.entries.size() > config.n) fail(ErrorCode::InvalidArgument, "list longer than N");
    ordered.push_back(&l);
  }
  std::sort(ordered.begin(), ordered.end(), [](const NormalizedList* a, const NormalizedList* b) { return a->model < b->model; });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->model == ordered[i - 1]->model) fail(ErrorCode::ModelSetMismatch, "duplicate model list");
  }

  std::map<DocId, double> sums;
  for (const NormalizedList* l : ordered) {
    for (const NormalizedEntry& e : l->entries) sums[e.doc] += e.value;
  }
  FusedList out;
  out.entries.reserve(sums.size());
  for (const auto& [doc, score] : sums) out.entries.push_back({doc, score, 0});
  assign_ranks(out.entries);
  return out;
}

}  // namespace evir
