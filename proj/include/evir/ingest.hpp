#pragma once

// Corpus ingestion: manifests, frame sampling and the two-pass index build.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "evir/codec.hpp"
#include "evir/index.hpp"
#include "evir/parallel.hpp"

namespace evir {

namespace fs = std::filesystem;

struct ManifestRecord {
  std::string video_id;
  fs::path source;  // frame directory or video file
  std::optional<double> duration_hint;
};

struct CorpusManifest {
  std::vector<ManifestRecord> records;
};

namespace text {

inline std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

/// Calls fn(line_number, fields) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::string_view body, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t nl = body.find('\n', pos);
    const std::string_view raw = body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    const std::string_view line = trim(raw);
    if (!line.empty() && line.front() != '#') {
      auto fields = split_tabs(line);
      for (auto& f : fields) f = std::string(trim(f));
      fn(line_no, fields);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

inline std::string slurp(const fs::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

}  // namespace text

/// Line format: video_id TAB source [TAB duration_seconds]. Relative sources
/// resolve against `base`. Lines starting with '#' are comments.
inline CorpusManifest parse_manifest(std::string_view body, const fs::path& base = {}) {
  CorpusManifest m;
  std::set<std::string> ids;
  text::for_each_record(body, [&](std::size_t line, const std::vector<std::string>& f) {
    const std::string where = "manifest line " + std::to_string(line);
    if (f.size() < 2 || f.size() > 3 || f[0].empty() || f[1].empty()) {
      fail(ErrorCode::Malformed, where + ": expected video_id<TAB>source[<TAB>duration]");
    }
    if (!ids.insert(f[0]).second) fail(ErrorCode::Malformed, where + ": duplicate video id " + f[0]);
    ManifestRecord r{f[0], fs::path(f[1]), std::nullopt};
    if (r.source.is_relative() && !base.empty()) r.source = base / r.source;
    if (f.size() == 3 && !f[2].empty()) {
      try {
        std::size_t used = 0;
        const double d = std::stod(f[2], &used);
        if (used != f[2].size() || !(d >= 0.0)) throw std::invalid_argument("bad");
        r.duration_hint = d;
      } catch (const std::exception&) {
        fail(ErrorCode::Malformed, where + ": bad duration '" + f[2] + "'");
      }
    }
    m.records.push_back(std::move(r));
  });
  return m;
}

inline CorpusManifest load_manifest(const fs::path& path) {
  return parse_manifest(text::slurp(path), path.parent_path());
}

inline std::string format_manifest(const CorpusManifest& m) {
  std::ostringstream out;
  out << "# video_id\tsource\tduration_seconds\n";
  for (const ManifestRecord& r : m.records) {
    out << r.video_id << '\t' << r.source.generic_string();
    if (r.duration_hint) out << '\t' << *r.duration_hint;
    out << '\n';
  }
  return out.str();
}

struct GroundTruth {
  std::map<std::string, std::string> video_of;  // query_id -> source video_id
};

/// Line format: query_id TAB video_id.
inline GroundTruth parse_ground_truth(std::string_view body) {
  GroundTruth gt;
  text::for_each_record(body, [&](std::size_t line, const std::vector<std::string>& f) {
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      fail(ErrorCode::Malformed, "ground truth line " + std::to_string(line) + ": expected query_id<TAB>video_id");
    }
    if (!gt.video_of.emplace(f[0], f[1]).second) {
      fail(ErrorCode::Malformed, "ground truth line " + std::to_string(line) + ": duplicate query " + f[0]);
    }
  });
  return gt;
}

inline GroundTruth load_ground_truth(const fs::path& path) { return parse_ground_truth(text::slurp(path)); }

struct SamplingConfig {
  double fps = 5.0;
};

/// External decoder for video-file sources. `command` is a shell template with
/// {input}, {fps} and {outdir} placeholders; it must write still images
/// (PNG or JPEG) sampled at {fps} into {outdir}.
struct DecoderConfig {
  std::string command;
  fs::path cache_dir = fs::temp_directory_path() / "evir-frames";
};

struct SampledFrame {
  FrameRef ref;
  fs::path path;

  [[nodiscard]] PixelGrid load() const { return load_image(path); }
};

inline bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Image files directly inside `dir`, in lexicographic filename order.
inline std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

inline std::string expand_decoder(const std::string& tmpl, const fs::path& input, double fps, const fs::path& outdir) {
  std::ostringstream fps_text;
  fps_text << fps;
  const std::map<std::string, std::string> values = {
      {"{input}", shell_quote(input.string())}, {"{fps}", fps_text.str()}, {"{outdir}", shell_quote(outdir.string())}};
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    bool replaced = false;
    for (const auto& [key, value] : values) {
      if (tmpl.compare(i, key.size(), key) == 0) {
        out += value;
        i += key.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

/// Frames of one manifest record at timestamps i / fps. Directories are read
/// in filename order; video files go through the external decoder.
inline std::vector<SampledFrame> sample_frames(const ManifestRecord& rec, const SamplingConfig& sampling,
                                               const DecoderConfig& decoder = {}) {
  if (!(sampling.fps > 0.0)) fail(ErrorCode::InvalidArgument, "fps must be > 0");
  std::error_code ec;
  if (!fs::exists(rec.source, ec)) {
    fail(ErrorCode::SourceMissing, "video " + rec.video_id + ": " + rec.source.string() + " does not exist");
  }
  fs::path dir = rec.source;
  if (!fs::is_directory(rec.source)) {
    if (decoder.command.empty()) {
      fail(ErrorCode::DecoderFailed, "video " + rec.video_id + ": " + rec.source.string() +
                                         " is a file and no decoder command is configured");
    }
    dir = decoder.cache_dir / rec.video_id;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);
    const std::string cmd = expand_decoder(decoder.command, rec.source, sampling.fps, dir);
    const int status = std::system(cmd.c_str());
    if (status != 0) {
      fail(ErrorCode::DecoderFailed, "video " + rec.video_id + ": decoder exited with status " + std::to_string(status));
    }
    if (list_images(dir).empty()) fail(ErrorCode::DecoderFailed, "video " + rec.video_id + ": decoder produced no frames");
  }
  std::vector<SampledFrame> out;
  std::uint32_t i = 0;
  for (const fs::path& p : list_images(dir)) out.push_back({make_frame_ref(rec.video_id, i++, sampling.fps), p});
  return out;
}

struct BuildOptions {
  IndexConfig config{};
  DecoderConfig decoder{};
  std::optional<Vocabulary> vocabulary;  // skip training when set
  unsigned threads = 0;
  std::size_t local_cache_bytes = std::size_t{1} << 30;
  std::function<void(const std::string&)> log;
};

struct BuildReport {
  std::size_t videos = 0;
  std::size_t frames = 0;
  std::size_t local_descriptors = 0;
  std::size_t vocabulary_samples = 0;
  int vocabulary_iterations = 0;
  double seconds = 0.0;
};

namespace detail {

using LocalRows = std::vector<std::uint8_t>;  // n x 144 CEDD bins

inline LocalRows pack_locals(const std::vector<LocalDescriptor>& locals) {
  LocalRows rows;
  rows.reserve(locals.size() * 144);
  for (const LocalDescriptor& l : locals) {
    for (float v : l.values.values()) rows.push_back(static_cast<std::uint8_t>(v));
  }
  return rows;
}

inline BovwHistogram encode_rows(const LocalRows& rows, const Vocabulary& vocab) {
  std::vector<LocalDescriptor> locals;
  const std::size_t n = rows.size() / 144;
  locals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> v(rows.begin() + static_cast<std::ptrdiff_t>(i * 144),
                         rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * 144));
    locals.push_back({Keypoint{}, Descriptor(Model::Cedd, std::move(v))});
  }
  return encode_bovw(locals, vocab);
}

template <typename Fn>
auto with_video_context(const std::string& video_id, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.message().find("video " + video_id) != std::string::npos) throw;
    fail(e.code(), "video " + video_id + ": " + e.message());
  }
}

}  // namespace detail

namespace detail {

struct LocalPass {
  Vocabulary vocabulary;
  std::vector<LocalRows> cache;  // per frame; empty when over budget
  bool cached = false;
  std::size_t total_locals = 0;
  std::size_t samples = 0;
};

inline std::vector<SampledFrame> sample_manifest(const CorpusManifest& manifest, const BuildOptions& opt) {
  std::vector<SampledFrame> frames;
  for (const ManifestRecord& rec : manifest.records) {
    auto sampled = sample_frames(rec, SamplingConfig{opt.config.sampling_fps}, opt.decoder);
    if (opt.log) opt.log("video " + rec.video_id + ": " + std::to_string(sampled.size()) + " frames");
    frames.insert(frames.end(), std::make_move_iterator(sampled.begin()), std::make_move_iterator(sampled.end()));
  }
  return frames;
}

/// Local descriptors of every frame; trains the vocabulary on a fixed-seed
/// uniform sample of at most config.vocab_sample_budget of them.
inline LocalPass local_pass(const std::vector<SampledFrame>& frames, const BuildOptions& opt) {
  LocalPass out;
  out.cache.resize(frames.size());
  out.cached = true;
  std::size_t cached_bytes = 0;
  const std::size_t budget = opt.config.vocab_sample_budget;
  FeatureMatrix reservoir(dimension(Model::Cedd));
  std::mt19937_64 rng(opt.config.vocab_seed ^ 0x9E3779B97F4A7C15ull);
  const std::size_t batch = std::max<std::size_t>(1, resolve_threads(opt.threads) * 4);
  for (std::size_t start = 0; start < frames.size(); start += batch) {
    const std::size_t end = std::min(frames.size(), start + batch);
    std::vector<LocalRows> rows(end - start);
    parallel_for(end - start, opt.threads, [&](std::size_t j) {
      const SampledFrame& f = frames[start + j];
      rows[j] = with_video_context(f.ref.video_id,
                                   [&] { return pack_locals(local_features(f.load(), opt.config.detector)); });
    });
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const std::size_t n = rows[j].size() / 144;
      for (std::size_t r = 0; r < n; ++r, ++out.total_locals) {
        const std::uint8_t* src = rows[j].data() + r * 144;
        if (out.total_locals < budget) {
          reservoir.data.insert(reservoir.data.end(), src, src + 144);
        } else {
          const auto slot = static_cast<std::size_t>(rng() % (out.total_locals + 1));
          if (slot < budget) std::copy(src, src + 144, reservoir.data.begin() + static_cast<std::ptrdiff_t>(slot * 144));
        }
      }
      if (out.cached) {
        cached_bytes += rows[j].size();
        if (cached_bytes > opt.local_cache_bytes) {
          out.cached = false;
          out.cache.clear();
        } else {
          out.cache[start + j] = std::move(rows[j]);
        }
      }
    }
  }
  out.samples = reservoir.rows();
  if (opt.log) {
    opt.log("vocabulary: " + std::to_string(dimension(Model::Bovw)) + " words from " + std::to_string(out.samples) +
            " of " + std::to_string(out.total_locals) + " local descriptors");
  }
  try {
    out.vocabulary = train_vocabulary(reservoir, dimension(Model::Bovw), opt.config.vocab_seed,
                                      static_cast<int>(opt.config.vocab_max_iter));
  } catch (const Error& e) {
    fail(e.code(), "vocabulary training: " + e.message());
  }
  return out;
}

}  // namespace detail

/// Trains the visual vocabulary of a corpus without building an index.
inline Vocabulary train_corpus_vocabulary(const CorpusManifest& manifest, const BuildOptions& opt) {
  opt.config.validate();
  BuildOptions o = opt;
  o.local_cache_bytes = 0;
  return detail::local_pass(detail::sample_manifest(manifest, o), o).vocabulary;
}

/// Two passes over every sampled frame: local descriptors and vocabulary
/// training, then full extraction. Frames are stored in manifest order, then
/// frame order.
inline Index build_index(const CorpusManifest& manifest, const BuildOptions& opt, BuildReport* report = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  opt.config.validate();
  auto log = [&](const std::string& msg) {
    if (opt.log) opt.log(msg);
  };
  const std::vector<SampledFrame> frames = detail::sample_manifest(manifest, opt);

  detail::LocalPass pass;
  if (opt.vocabulary) {
    pass.vocabulary = *opt.vocabulary;
  } else {
    pass = detail::local_pass(frames, opt);
  }
  const Vocabulary& vocab = pass.vocabulary;
  std::size_t total_locals = 0;
  const std::size_t sample_count = pass.samples;
  const int iterations = vocab.iterations_run();
  std::vector<detail::LocalRows>& cache = pass.cache;

  // Pass 2: every descriptor, inserted in frame order.
  Index idx(opt.config);
  idx.set_vocabulary(vocab);
  const bool have_cache = pass.cached;
  const std::size_t batch = std::max<std::size_t>(1, resolve_threads(opt.threads) * 4);
  for (std::size_t start = 0; start < frames.size(); start += batch) {
    const std::size_t end = std::min(frames.size(), start + batch);
    std::vector<std::pair<FrameRecord, FrameDescriptors>> out(end - start);
    parallel_for(end - start, opt.threads, [&](std::size_t j) {
      const SampledFrame& f = frames[start + j];
      out[j] = detail::with_video_context(f.ref.video_id, [&] {
        const PixelGrid img = f.load();
        FrameDescriptors d;
        d.cedd = extract_cedd(img);
        d.acc = extract_acc(img);
        d.phog = extract_phog(img);
        const detail::LocalRows rows =
            have_cache ? std::move(cache[start + j]) : detail::pack_locals(local_features(img, opt.config.detector));
        d.keypoint_count = rows.size() / 144;
        d.bovw = detail::encode_rows(rows, idx.vocabulary()).descriptor();
        return std::make_pair(FrameRecord{f.ref, img.width(), img.height(), fs::absolute(f.path).string()}, d);
      });
    });
    for (auto& [rec, d] : out) {
      total_locals += d.keypoint_count;
      idx.add_descriptors(std::move(rec), d);
    }
    if (have_cache) {
      for (std::size_t j = start; j < end; ++j) detail::LocalRows().swap(cache[j]);
    }
  }
  for (const ManifestRecord& rec : manifest.records) {
    if (rec.duration_hint && idx.find_video(rec.video_id) != nullptr) {
      idx.set_video_duration(rec.video_id, static_cast<float>(*rec.duration_hint));
    }
  }

  if (report != nullptr) {
    report->videos = idx.videos().size();
    report->frames = idx.size();
    report->local_descriptors = total_locals;
    report->vocabulary_samples = sample_count;
    report->vocabulary_iterations = iterations;
    report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  log("indexed " + std::to_string(idx.size()) + " frames from " + std::to_string(idx.videos().size()) + " videos");
  return idx;
}

}  // namespace evir
