#pragma once

// Evaluation against ground truth: where does the source video of each query
// land among the returned videos?

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "evir/ingest.hpp"
#include "evir/video_rank.hpp"

namespace evir {

struct QueryImage {
  std::string id;
  PixelGrid image;
};

/// Every image file in `dir`, id = file stem, in filename order.
inline std::vector<QueryImage> load_queries(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<QueryImage> out;
  for (const fs::path& p : list_images(dir)) out.push_back({p.stem().string(), load_image(p)});
  return out;
}

struct QueryOutcome {
  std::string query_id;
  std::string expected_video;
  int position = 0;  // 1-based place of the expected video, 0 when absent
  QueryResult result;
};

struct EngineEvaluation {
  Engine engine = Engine::A;
  std::size_t queries = 0;
  std::array<std::size_t, 3> at{};  // queries whose video is exactly at position 1, 2, 3
  std::vector<QueryOutcome> outcomes;  // sorted by query id
  double total_ms = 0.0;

  [[nodiscard]] std::size_t misses() const noexcept { return queries - at[0] - at[1] - at[2]; }
  [[nodiscard]] double rate_at(std::size_t k) const noexcept {
    return queries == 0 ? 0.0 : static_cast<double>(at.at(k - 1)) / static_cast<double>(queries);
  }
  /// Queries whose video is within the first k.
  [[nodiscard]] std::size_t hits_within(std::size_t k) const noexcept {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k && i < at.size(); ++i) hits += at[i];
    return hits;
  }
  [[nodiscard]] double cumulative(std::size_t k) const noexcept {
    return queries == 0 ? 0.0 : static_cast<double>(hits_within(k)) / static_cast<double>(queries);
  }
};

inline void require_ground_truth(const std::vector<QueryImage>& queries, const GroundTruth& gt) {
  for (const QueryImage& q : queries) {
    if (!gt.video_of.contains(q.id)) {
      fail(ErrorCode::QueryMissingFromGroundTruth, "query " + q.id + " has no ground-truth video");
    }
  }
}

/// 1-based position of `video_id` in the result, 0 when it is missing.
inline int position_of(const QueryResult& r, const std::string& video_id) {
  for (std::size_t i = 0; i < r.videos.size(); ++i) {
    if (r.videos[i].video_id == video_id) return static_cast<int>(i + 1);
  }
  return 0;
}

/// Tabulates one engine. `search(query)` produces the ranked videos of a
/// query; it is called from up to `threads` workers at once.
template <typename SearchFn>
EngineEvaluation evaluate_with(const std::vector<QueryImage>& queries, const GroundTruth& gt, Engine engine,
                               unsigned threads, SearchFn&& search) {
  require_ground_truth(queries, gt);
  EngineEvaluation ev;
  ev.engine = engine;
  ev.queries = queries.size();
  ev.outcomes.resize(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    const QueryImage& q = queries[i];
    QueryOutcome& o = ev.outcomes[i];
    o.query_id = q.id;
    o.expected_video = gt.video_of.at(q.id);
    o.result = search(q);
    o.position = position_of(o.result, o.expected_video);
  });
  for (const QueryOutcome& o : ev.outcomes) {
    if (o.position >= 1 && o.position <= 3) ++ev.at[static_cast<std::size_t>(o.position - 1)];
    ev.total_ms += o.result.elapsed_ms;
  }
  std::sort(ev.outcomes.begin(), ev.outcomes.end(),
            [](const QueryOutcome& a, const QueryOutcome& b) { return a.query_id < b.query_id; });
  return ev;
}

/// Runs every query through the full pipeline. Queries run in parallel, each
/// scanning the index on a single thread.
inline EngineEvaluation evaluate(const Index& idx, const std::vector<QueryImage>& queries, const GroundTruth& gt,
                                 const SearchOptions& opt) {
  SearchOptions inner = opt;
  inner.threads = 1;
  return evaluate_with(queries, gt, opt.engine, opt.threads,
                       [&](const QueryImage& q) { return search_videos(idx, q.image, inner, q.id); });
}

inline std::vector<EngineEvaluation> evaluate(const Index& idx, const std::vector<QueryImage>& queries,
                                              const GroundTruth& gt, const std::vector<Engine>& engines,
                                              SearchOptions opt = {}) {
  require_ground_truth(queries, gt);
  std::vector<EngineEvaluation> out;
  for (Engine e : engines) {
    opt.engine = e;
    out.push_back(evaluate(idx, queries, gt, opt));
  }
  return out;
}

inline std::string engine_label(Engine e) {
  switch (e) {
    case Engine::A: return "Sum of Ranks";
    case Engine::B: return "Sum of Scores";
    case Engine::C: return "SIMPLE-CEDD";
  }
  return "?";
}

/// Precision table: one column per engine, counts with percentages.
inline std::string format_table(const std::vector<EngineEvaluation>& evals) {
  auto fmt = [](const char* f, auto... v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v...);
    return std::string(buf);
  };
  std::ostringstream out;
  out << fmt("%-16s", "");
  for (const EngineEvaluation& e : evals) out << fmt("%22s", engine_label(e.engine).c_str());
  out << '\n';
  for (std::size_t k = 1; k <= 3; ++k) {
    out << fmt("%-16s", fmt("Precision @ %zu", k).c_str());
    for (const EngineEvaluation& e : evals) {
      out << fmt("%22s", fmt("%zu/%zu (%.1f%%)", e.at[k - 1], e.queries, 100.0 * e.rate_at(k)).c_str());
    }
    out << '\n';
  }
  out << fmt("%-16s", "Top 3");
  for (const EngineEvaluation& e : evals) {
    out << fmt("%22s", fmt("%zu/%zu (%.1f%%)", e.hits_within(3), e.queries, 100.0 * e.cumulative(3)).c_str());
  }
  out << '\n';
  out << fmt("%-16s", "Missed");
  for (const EngineEvaluation& e : evals) out << fmt("%22zu", e.misses());
  out << '\n';
  return out.str();
}

}  // namespace evir
