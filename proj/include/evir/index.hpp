#pragma once

// In-memory frame index: per-model contiguous descriptor tables searched by
// linear scan.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "evir/acc.hpp"
#include "evir/bovw.hpp"
#include "evir/cedd.hpp"
#include "evir/descriptor.hpp"
#include "evir/error.hpp"
#include "evir/imaging.hpp"
#include "evir/keypoints.hpp"
#include "evir/local_features.hpp"
#include "evir/phog.hpp"
#include "evir/vocabulary.hpp"

namespace evir {

using DocId = std::uint32_t;

struct FrameRef {
  std::string video_id;
  std::uint32_t frame_index = 0;
  double timestamp = 0.0;  // seconds, frame_index / sampling fps

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

inline FrameRef make_frame_ref(std::string video_id, std::uint32_t frame_index, double fps) {
  return FrameRef{std::move(video_id), frame_index, frame_index / fps};
}

struct FrameRecord {
  FrameRef ref;
  int width = 0;
  int height = 0;
  std::string source;  // location of the still image, empty when unknown

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct VideoRecord {
  std::string video_id;
  float duration = 0.0f;  // seconds
  std::uint32_t frame_count = 0;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct IndexConfig {
  float sampling_fps = 5.0f;
  DetectorParams detector{};
  std::uint64_t vocab_seed = 42;
  std::uint32_t vocab_max_iter = 50;
  std::uint32_t vocab_sample_budget = 200000;
  DistanceMetric cedd_metric = DistanceMetric::Tanimoto;
  DistanceMetric acc_metric = DistanceMetric::L1;
  DistanceMetric phog_metric = DistanceMetric::L1;
  std::uint32_t default_top_n = 50;

  [[nodiscard]] DistanceMetric metric_for(Model m) const noexcept {
    switch (m) {
      case Model::Cedd: return cedd_metric;
      case Model::Acc: return acc_metric;
      case Model::Phog: return phog_metric;
      case Model::Bovw: return DistanceMetric::Tanimoto;  // unused: BoVW is scored by cosine
    }
    return DistanceMetric::L1;
  }

  void validate() const {
    if (!(sampling_fps > 0.0f)) fail(ErrorCode::InvalidArgument, "sampling fps must be > 0");
    if (default_top_n < 1) fail(ErrorCode::InvalidArgument, "top_n must be >= 1");
    for (Model m : kGlobalModels) {
      if (!metric_allowed(m, metric_for(m))) fail(ErrorCode::MetricMismatch, std::string(to_string(m)) + " metric");
    }
  }

  friend bool operator==(const IndexConfig& a, const IndexConfig& b) {
    return a.sampling_fps == b.sampling_fps && a.detector.threshold == b.detector.threshold &&
           a.detector.octaves == b.detector.octaves && a.vocab_seed == b.vocab_seed &&
           a.vocab_max_iter == b.vocab_max_iter && a.vocab_sample_budget == b.vocab_sample_budget &&
           a.cedd_metric == b.cedd_metric && a.acc_metric == b.acc_metric && a.phog_metric == b.phog_metric &&
           a.default_top_n == b.default_top_n;
  }
};

struct FrameDescriptors {
  Descriptor cedd{Model::Cedd};
  Descriptor acc{Model::Acc};
  Descriptor phog{Model::Phog};
  Descriptor bovw{Model::Bovw};
  std::size_t keypoint_count = 0;

  [[nodiscard]] const Descriptor& get(Model m) const noexcept {
    switch (m) {
      case Model::Cedd: return cedd;
      case Model::Acc: return acc;
      case Model::Phog: return phog;
      case Model::Bovw: return bovw;
    }
    return cedd;
  }
};

struct RankedEntry {
  DocId doc = 0;
  double score = 0.0;
  std::uint32_t rank = 0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct RankedList {
  Model model = Model::Cedd;
  std::vector<RankedEntry> entries;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Local features of one image, ready for BoVW encoding.
inline std::vector<LocalDescriptor> local_features(const PixelGrid& img, const DetectorParams& detector) {
  if (img.width() < 32 || img.height() < 32) return {};
  return describe_local(img, detect_keypoints(to_grayscale(img), detector));
}

/// All four descriptors of one image.
inline FrameDescriptors describe_frame(const PixelGrid& img, const IndexConfig& config, const Vocabulary& vocab) {
  if (vocab.empty()) fail(ErrorCode::VocabularyMissing, "train or load a vocabulary before describing frames");
  FrameDescriptors out;
  out.cedd = extract_cedd(img);
  out.acc = extract_acc(img);
  out.phog = extract_phog(img);
  const auto locals = local_features(img, config.detector);
  out.keypoint_count = locals.size();
  const BovwHistogram h = encode_bovw(locals, vocab);
  if (h.weights.size() != dimension(Model::Bovw)) {
    fail(ErrorCode::ModelMismatch, "vocabulary has " + std::to_string(h.weights.size()) + " words, index expects " +
                                       std::to_string(dimension(Model::Bovw)));
  }
  out.bovw = h.descriptor();
  return out;
}

/// Orders by score descending, then DocId ascending.
inline bool ranks_before(double score_a, DocId a, double score_b, DocId b) noexcept {
  return score_a > score_b || (score_a == score_b && a < b);
}

class Index {
 public:
  explicit Index(IndexConfig config = {}) : config_(config) { config_.validate(); }

  [[nodiscard]] const IndexConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t size() const noexcept { return frames_.size(); }
  [[nodiscard]] bool empty() const noexcept { return frames_.empty(); }
  [[nodiscard]] const std::vector<FrameRecord>& frames() const noexcept { return frames_; }
  [[nodiscard]] const FrameRecord& frame(DocId doc) const { return frames_.at(doc); }
  [[nodiscard]] const std::vector<VideoRecord>& videos() const noexcept { return videos_; }
  [[nodiscard]] const Vocabulary& vocabulary() const noexcept { return vocab_; }

  void set_vocabulary(Vocabulary vocab) {
    if (!frames_.empty()) fail(ErrorCode::InvalidArgument, "vocabulary is fixed once frames are stored");
    if (vocab.size() != dimension(Model::Bovw) || vocab.dim() != dimension(Model::Cedd)) {
      fail(ErrorCode::ModelMismatch, "vocabulary must be " + std::to_string(dimension(Model::Bovw)) + " x " +
                                         std::to_string(dimension(Model::Cedd)));
    }
    vocab_ = std::move(vocab);
  }

  [[nodiscard]] const VideoRecord* find_video(const std::string& video_id) const noexcept {
    const auto it = video_pos_.find(video_id);
    return it == video_pos_.end() ? nullptr : &videos_[it->second];
  }

  [[nodiscard]] std::optional<DocId> find_frame(const std::string& video_id, std::uint32_t frame_index) const {
    const auto it = frame_pos_.find({video_id, frame_index});
    if (it == frame_pos_.end()) return std::nullopt;
    return it->second;
  }

  /// Extracts all descriptors of `img` and stores them under the next DocId.
  DocId add_frame(const FrameRef& ref, const PixelGrid& img, std::string source = {}) {
    check_new(ref);
    if (vocab_.empty()) fail(ErrorCode::VocabularyMissing, "vocabulary must be trained before frames are added");
    return add_descriptors(FrameRecord{ref, img.width(), img.height(), std::move(source)},
                           describe_frame(img, config_, vocab_));
  }

  /// Stores precomputed descriptors. Used by the build pipeline, which extracts
  /// descriptors off the insertion path, and by loaders.
  DocId add_descriptors(FrameRecord record, const FrameDescriptors& d) {
    check_new(record.ref);
    for (Model m : kAllModels) {
      if (d.get(m).model() != m) fail(ErrorCode::ModelMismatch, "descriptor slot holds the wrong model");
    }
    const auto doc = static_cast<DocId>(frames_.size());
    for (float v : d.cedd.values()) cedd_.push_back(static_cast<std::uint8_t>(v));
    acc_.insert(acc_.end(), d.acc.values().begin(), d.acc.values().end());
    phog_.insert(phog_.end(), d.phog.values().begin(), d.phog.values().end());
    bovw_.insert(bovw_.end(), d.bovw.values().begin(), d.bovw.values().end());

    frame_pos_.emplace(std::make_pair(record.ref.video_id, record.ref.frame_index), doc);
    auto [it, inserted] = video_pos_.try_emplace(record.ref.video_id, videos_.size());
    if (inserted) videos_.push_back(VideoRecord{record.ref.video_id, 0.0f, 0});
    VideoRecord& video = videos_[it->second];
    ++video.frame_count;
    video.duration = std::max(video.duration, static_cast<float>((record.ref.frame_index + 1.0) / config_.sampling_fps));
    frames_.push_back(std::move(record));
    return doc;
  }

  /// Overrides a video's duration (e.g. from a manifest hint). Never shrinks
  /// below the span covered by its frames.
  void set_video_duration(const std::string& video_id, float seconds) {
    const auto it = video_pos_.find(video_id);
    if (it == video_pos_.end()) fail(ErrorCode::InvalidArgument, "unknown video " + video_id);
    videos_[it->second].duration = std::max(videos_[it->second].duration, seconds);
  }

  [[nodiscard]] Descriptor descriptor(Model m, DocId doc) const {
    if (doc >= frames_.size()) fail(ErrorCode::InvalidArgument, "DocId out of range");
    const std::size_t dim = dimension(m);
    const std::size_t off = static_cast<std::size_t>(doc) * dim;
    std::vector<float> v(dim);
    switch (m) {
      case Model::Cedd: std::copy_n(cedd_.begin() + static_cast<std::ptrdiff_t>(off), dim, v.begin()); break;
      case Model::Acc: std::copy_n(acc_.begin() + static_cast<std::ptrdiff_t>(off), dim, v.begin()); break;
      case Model::Phog: std::copy_n(phog_.begin() + static_cast<std::ptrdiff_t>(off), dim, v.begin()); break;
      case Model::Bovw: std::copy_n(bovw_.begin() + static_cast<std::ptrdiff_t>(off), dim, v.begin()); break;
    }
    return Descriptor(m, std::move(v));
  }

  /// Similarity of the query to every stored frame, indexed by DocId.
  [[nodiscard]] std::vector<double> score_all(Model m, const Descriptor& query, unsigned threads = 0) const {
    if (query.model() != m) {
      fail(ErrorCode::ModelMismatch, "query is " + std::string(to_string(query.model())) + ", searched model is " +
                                         std::string(to_string(m)));
    }
    const std::size_t n = frames_.size();
    std::vector<double> scores(n, 0.0);
    const auto q = query.values();
    const DistanceMetric metric = config_.metric_for(m);
    const std::size_t dim = dimension(m);

    auto run = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t off = i * dim;
        switch (m) {
          case Model::Cedd:
            scores[i] = similarity_from_distance(metric::distance(metric, q, std::span<const std::uint8_t>(cedd_.data() + off, dim)));
            break;
          case Model::Acc:
            scores[i] = similarity_from_distance(metric::distance(metric, q, std::span<const float>(acc_.data() + off, dim)));
            break;
          case Model::Phog:
            scores[i] = similarity_from_distance(metric::distance(metric, q, std::span<const float>(phog_.data() + off, dim)));
            break;
          case Model::Bovw:
            scores[i] = cosine_similarity(q, std::span<const float>(bovw_.data() + off, dim));
            break;
        }
      }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    constexpr std::size_t kMinPerThread = 4096;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / kMinPerThread)));
    if (threads <= 1) {
      run(0, n);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (n + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(n, t * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(run, begin, end);
      }
      for (auto& th : pool) th.join();
    }
    return scores;
  }

  /// Linear scan over one model's table; best top_n by score, ties to the lower DocId.
  [[nodiscard]] RankedList search_model(Model m, const Descriptor& query, std::size_t top_n, unsigned threads = 0) const {
    if (top_n < 1) fail(ErrorCode::InvalidArgument, "top_n must be >= 1");
    if (frames_.empty()) fail(ErrorCode::EmptyIndex, "index holds no frames");
    const std::vector<double> scores = score_all(m, query, threads);
    return top_of(m, scores, top_n);
  }

  [[nodiscard]] static RankedList top_of(Model m, const std::vector<double>& scores, std::size_t top_n) {
    std::vector<DocId> order(scores.size());
    std::iota(order.begin(), order.end(), DocId{0});
    const std::size_t keep = std::min(top_n, order.size());
    auto before = [&](DocId a, DocId b) { return ranks_before(scores[a], a, scores[b], b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), before);

    RankedList out{m, {}};
    out.entries.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      out.entries.push_back(RankedEntry{order[i], scores[order[i]], static_cast<std::uint32_t>(i + 1)});
    }
    return out;
  }

  // Raw tables, exposed for persistence.
  [[nodiscard]] const std::vector<std::uint8_t>& cedd_table() const noexcept { return cedd_; }
  [[nodiscard]] const std::vector<float>& float_table(Model m) const noexcept {
    switch (m) {
      case Model::Acc: return acc_;
      case Model::Phog: return phog_;
      default: return bovw_;
    }
  }

 private:
  void check_new(const FrameRef& ref) const {
    if (frame_pos_.contains({ref.video_id, ref.frame_index})) {
      fail(ErrorCode::DuplicateFrame, ref.video_id + "#" + std::to_string(ref.frame_index));
    }
  }

  IndexConfig config_;
  Vocabulary vocab_;
  std::vector<FrameRecord> frames_;
  std::vector<VideoRecord> videos_;
  std::map<std::string, std::size_t> video_pos_;
  std::map<std::pair<std::string, std::uint32_t>, DocId> frame_pos_;
  std::vector<std::uint8_t> cedd_;
  std::vector<float> acc_;
  std::vector<float> phog_;
  std::vector<float> bovw_;
};

}  // namespace evir
