#pragma once

// Fused frame ranking -> ranked videos. A video scores as its best frame.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "evir/engine.hpp"

namespace evir {

struct MatchedFrame {
  DocId doc = 0;
  std::uint32_t frame_index = 0;
  double timestamp = 0.0;
  double score = 0.0;

  friend bool operator==(const MatchedFrame&, const MatchedFrame&) = default;
};

struct VideoHit {
  std::string video_id;
  FrameRef best_frame;
  DocId best_doc = 0;
  double best_score = 0.0;
  std::vector<double> matched_timestamps;  // ascending
  std::vector<MatchedFrame> matches;       // same order as matched_timestamps

  friend bool operator==(const VideoHit&, const VideoHit&) = default;
};

struct QueryResult {
  std::string query_id;
  Engine engine = Engine::A;
  std::vector<VideoHit> videos;
  std::vector<FusedEntry> considered;  // the fused top list that was aggregated
  double elapsed_ms = 0.0;

  friend bool operator==(const QueryResult& a, const QueryResult& b) {
    return a.query_id == b.query_id && a.engine == b.engine && a.videos == b.videos && a.considered == b.considered;
  }
};

struct AggregationCaps {
  std::size_t frame_cap = 10;
  std::size_t video_cap = 3;
};

/// Groups the first `frame_cap` fused frames by video and keeps the best
/// `video_cap` videos. `frame_of(doc)` returns the FrameRef of a DocId.
/// Equal-scored frames within a video resolve to the earliest one; videos
/// with equal scores are ordered by id.
template <typename FrameLookup>
QueryResult aggregate_with(const FusedList& fused, FrameLookup&& frame_of, AggregationCaps caps = {}) {
  if (caps.frame_cap < 1 || caps.video_cap < 1) fail(ErrorCode::InvalidArgument, "caps must be >= 1");
  QueryResult out;
  const std::size_t take = std::min(caps.frame_cap, fused.entries.size());
  out.considered.assign(fused.entries.begin(), fused.entries.begin() + static_cast<std::ptrdiff_t>(take));

  std::map<std::string, VideoHit> by_video;
  for (const FusedEntry& e : out.considered) {
    const FrameRef& ref = frame_of(e.doc);
    auto [it, inserted] = by_video.try_emplace(ref.video_id);
    VideoHit& hit = it->second;
    const bool better = inserted || e.score > hit.best_score ||
                        (e.score == hit.best_score && ref.frame_index < hit.best_frame.frame_index);
    if (better) {
      hit.video_id = ref.video_id;
      hit.best_frame = ref;
      hit.best_doc = e.doc;
      hit.best_score = e.score;
    }
    hit.matches.push_back({e.doc, ref.frame_index, ref.timestamp, e.score});
  }

  for (auto& [id, hit] : by_video) {
    std::sort(hit.matches.begin(), hit.matches.end(), [](const MatchedFrame& a, const MatchedFrame& b) {
      return a.timestamp < b.timestamp || (a.timestamp == b.timestamp && a.frame_index < b.frame_index);
    });
    for (const MatchedFrame& m : hit.matches) hit.matched_timestamps.push_back(m.timestamp);
    out.videos.push_back(std::move(hit));
  }
  std::stable_sort(out.videos.begin(), out.videos.end(), [](const VideoHit& a, const VideoHit& b) {
    return a.best_score > b.best_score || (a.best_score == b.best_score && a.video_id < b.video_id);
  });
  if (out.videos.size() > caps.video_cap) out.videos.resize(caps.video_cap);
  return out;
}

inline QueryResult aggregate_to_videos(const FusedList& fused, const Index& idx, AggregationCaps caps = {}) {
  return aggregate_with(fused, [&idx](DocId d) -> const FrameRef& { return idx.frame(d).ref; }, caps);
}

inline QueryResult aggregate_to_videos(const FusedList& fused, const std::vector<FrameRef>& frames,
                                       AggregationCaps caps = {}) {
  return aggregate_with(fused, [&frames](DocId d) -> const FrameRef& { return frames.at(d); }, caps);
}

struct SearchOptions {
  Engine engine = Engine::A;
  std::size_t n = 50;
  AggregationCaps caps{};
  unsigned threads = 0;
};

/// Full query pipeline: engine, then video aggregation, timed.
inline QueryResult search_videos(const Index& idx, const PixelGrid& query, const SearchOptions& opt,
                                 std::string query_id = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const FusedList fused = run_engine(idx, query, opt.engine, opt.n, opt.threads);
  QueryResult r = aggregate_to_videos(fused, idx, opt.caps);
  r.query_id = std::move(query_id);
  r.engine = opt.engine;
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace evir
