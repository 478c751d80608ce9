#pragma once

// JSON documents for search results, the video list and evaluation records.

#include <string>
#include <vector>

#include <json.hpp>

#include "evir/eval.hpp"

namespace evir {

using Json = nlohmann::json;

/// Duration of a video as stored in the index, 0 when unknown.
inline double video_duration(const Index* idx, const std::string& video_id) {
  if (idx == nullptr) return 0.0;
  const VideoRecord* v = idx->find_video(video_id);
  return v == nullptr ? 0.0 : v->duration;
}

inline Json to_json(const QueryResult& r, const Index* idx = nullptr) {
  Json videos = Json::array();
  for (std::size_t i = 0; i < r.videos.size(); ++i) {
    const VideoHit& v = r.videos[i];
    Json matches = Json::array();
    for (const MatchedFrame& m : v.matches) {
      matches.push_back({{"doc", m.doc}, {"frame_index", m.frame_index}, {"timestamp", m.timestamp}, {"score", m.score}});
    }
    videos.push_back({{"rank", i + 1},
                      {"video_id", v.video_id},
                      {"best_score", v.best_score},
                      {"best_frame", {{"doc", v.best_doc},
                                      {"frame_index", v.best_frame.frame_index},
                                      {"timestamp", v.best_frame.timestamp}}},
                      {"duration", video_duration(idx, v.video_id)},
                      {"matched_timestamps", v.matched_timestamps},
                      {"matches", std::move(matches)}});
  }
  return {{"query_id", r.query_id},
          {"engine", std::string(to_string(r.engine))},
          {"elapsed_ms", r.elapsed_ms},
          {"frames_considered", r.considered.size()},
          {"videos", std::move(videos)}};
}

inline Json videos_json(const Index& idx) {
  Json out = Json::array();
  for (const VideoRecord& v : idx.videos()) {
    out.push_back({{"video_id", v.video_id}, {"duration", v.duration}, {"frame_count", v.frame_count}});
  }
  return out;
}

inline Json to_json(const EngineEvaluation& e) {
  return {{"type", "summary"},
          {"engine", std::string(to_string(e.engine))},
          {"label", engine_label(e.engine)},
          {"queries", e.queries},
          {"at_1", e.at[0]},
          {"at_2", e.at[1]},
          {"at_3", e.at[2]},
          {"within_3", e.hits_within(3)},
          {"precision_at_1", e.rate_at(1)},
          {"precision_at_2", e.rate_at(2)},
          {"precision_at_3", e.rate_at(3)},
          {"precision_top_3", e.cumulative(3)},
          {"misses", e.misses()},
          {"total_ms", e.total_ms}};
}

/// One JSON object per line: every query outcome, then one summary per engine.
inline std::string format_records(const std::vector<EngineEvaluation>& evals) {
  std::string out;
  for (const EngineEvaluation& e : evals) {
    for (const QueryOutcome& o : e.outcomes) {
      Json videos = Json::array();
      for (const VideoHit& v : o.result.videos) videos.push_back(v.video_id);
      const Json line = {{"type", "query"},
                         {"engine", std::string(to_string(e.engine))},
                         {"query_id", o.query_id},
                         {"expected_video", o.expected_video},
                         {"position", o.position == 0 ? Json(nullptr) : Json(o.position)},
                         {"videos", std::move(videos)},
                         {"elapsed_ms", o.result.elapsed_ms}};
      out += line.dump() + '\n';
    }
  }
  for (const EngineEvaluation& e : evals) out += to_json(e).dump() + '\n';
  return out;
}

}  // namespace evir
