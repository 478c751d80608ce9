#pragma once

// HTTP search service over an immutable index snapshot.
//
//   POST /api/search                     multipart: image, engine, frame_cap, video_cap, query_id
//   GET  /api/videos                     video list
//   GET  /api/videos/{id}/frames/{index} stored frame image
//   GET  /api/health                     status and index size
//
// Every endpoint answers 503 until an index is installed.

#include <atomic>
#include <charconv>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>

#include "evir/serialize.hpp"

namespace evir {

struct ServiceOptions {
  std::size_t n = 50;
  AggregationCaps caps{};
  unsigned search_threads = 0;
};

class SearchService {
 public:
  explicit SearchService(ServiceOptions opt = {}) : opt_(opt) { install_routes(); }
  ~SearchService() { stop(); }
  SearchService(const SearchService&) = delete;
  SearchService& operator=(const SearchService&) = delete;

  /// Publishes the index; requests started earlier keep their snapshot.
  void set_index(std::shared_ptr<const Index> idx) {
    std::lock_guard lock(mu_);
    index_ = std::move(idx);
  }

  /// Records a load failure; the service keeps answering 503 with the reason.
  void set_load_error(std::string message) {
    std::lock_guard lock(mu_);
    load_error_ = std::move(message);
  }

  [[nodiscard]] std::shared_ptr<const Index> snapshot() const {
    std::lock_guard lock(mu_);
    return index_;
  }

  /// Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) fail(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
  }

  /// Serves on the calling thread until stop().
  bool run() { return server_.listen_after_bind(); }

  /// Serves on a background thread.
  void start() {
    worker_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    server_.stop();
    if (worker_.joinable()) worker_.join();
  }

  httplib::Server& http() noexcept { return server_; }

 private:
  static void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    res.status = status;
    res.set_content(Json{{"error", code}, {"message", message}}.dump(), "application/json");
  }

  /// The current index, or a 503 response when none is loaded yet.
  std::shared_ptr<const Index> require_index(httplib::Response& res) const {
    std::string reason;
    std::shared_ptr<const Index> idx;
    {
      std::lock_guard lock(mu_);
      idx = index_;
      reason = load_error_;
    }
    if (!idx) {
      res.set_header("Retry-After", "5");
      send_error(res, 503, "Unavailable", reason.empty() ? "index is loading" : "index failed to load: " + reason);
    }
    return idx;
  }

  static std::optional<std::string> field(const httplib::Request& req, const std::string& key) {
    if (req.has_file(key)) return req.get_file_value(key).content;
    if (req.has_param(key)) return req.get_param_value(key);
    return std::nullopt;
  }

  static std::optional<std::size_t> parse_count(const std::string& s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
  }

  void install_routes() {
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server_.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      std::shared_ptr<const Index> idx = snapshot();
      if (!idx) {
        std::string reason;
        {
          std::lock_guard lock(mu_);
          reason = load_error_;
        }
        res.status = 503;
        res.set_content(Json{{"status", reason.empty() ? "loading" : "failed"}, {"message", reason}}.dump(),
                        "application/json");
        return;
      }
      res.set_content(Json{{"status", "ok"},
                           {"frames", idx->size()},
                           {"videos", idx->videos().size()},
                           {"vocabulary", !idx->vocabulary().empty()}}
                          .dump(),
                      "application/json");
    });

    server_.Get("/api/videos", [this](const httplib::Request&, httplib::Response& res) {
      const auto idx = require_index(res);
      if (!idx) return;
      res.set_content(Json{{"videos", videos_json(*idx)}}.dump(), "application/json");
    });

    server_.Get("/api/videos/:id/frames/:index", [this](const httplib::Request& req, httplib::Response& res) {
      const auto idx = require_index(res);
      if (!idx) return;
      const std::string& video_id = req.path_params.at("id");
      const auto frame_index = parse_count(req.path_params.at("index"));
      if (idx->find_video(video_id) == nullptr) return send_error(res, 404, "NotFound", "unknown video " + video_id);
      if (!frame_index || *frame_index > UINT32_MAX) {
        return send_error(res, 404, "NotFound", "unknown frame " + req.path_params.at("index"));
      }
      const auto doc = idx->find_frame(video_id, static_cast<std::uint32_t>(*frame_index));
      if (!doc) return send_error(res, 404, "NotFound", "video " + video_id + " has no frame " + std::to_string(*frame_index));
      const FrameRecord& rec = idx->frame(*doc);
      if (rec.source.empty()) return send_error(res, 404, "NotFound", "frame image was not kept");
      try {
        const Bytes bytes = read_file(rec.source);
        const ImageFormat format = sniff_format(bytes);
        if (format == ImageFormat::Unknown) {
          const Bytes png = encode_png(decode_image(bytes));
          res.set_content(std::string(png.begin(), png.end()), "image/png");
        } else {
          res.set_content(std::string(bytes.begin(), bytes.end()), format == ImageFormat::Png ? "image/png" : "image/jpeg");
        }
      } catch (const Error& e) {
        send_error(res, 404, "NotFound", "frame image unavailable: " + e.message());
      }
    });

    server_.Post("/api/search", [this](const httplib::Request& req, httplib::Response& res) {
      const auto idx = require_index(res);
      if (!idx) return;
      if (!req.has_file("image")) return send_error(res, 400, "BadRequest", "multipart field 'image' is required");
      const httplib::MultipartFormData image = req.get_file_value("image");

      SearchOptions opt;
      opt.n = opt_.n;
      opt.caps = opt_.caps;
      opt.threads = opt_.search_threads;
      const std::string engine_text = field(req, "engine").value_or("A");
      const auto engine = parse_engine(engine_text);
      if (!engine) return send_error(res, 400, "BadRequest", "engine must be A, B or C, got '" + engine_text + "'");
      opt.engine = *engine;
      for (auto [key, slot] : {std::pair{"frame_cap", &opt.caps.frame_cap}, std::pair{"video_cap", &opt.caps.video_cap}}) {
        if (const auto text = field(req, key)) {
          const auto v = parse_count(*text);
          if (!v || *v < 1) return send_error(res, 400, "BadRequest", std::string(key) + " must be an integer >= 1");
          *slot = *v;
        }
      }
      std::string query_id = field(req, "query_id").value_or("");
      if (query_id.empty()) query_id = fs::path(image.filename).stem().string();

      PixelGrid query;
      try {
        query = decode_image(std::span(reinterpret_cast<const std::uint8_t*>(image.content.data()), image.content.size()));
      } catch (const Error& e) {
        return send_error(res, 400, to_string(e.code()), "image: " + e.message());
      }
      try {
        const QueryResult r = search_videos(*idx, query, opt, query_id);
        res.set_content(to_json(r, idx.get()).dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, 500, to_string(e.code()), e.message());
      }
    });
  }

  ServiceOptions opt_;
  mutable std::mutex mu_;
  std::shared_ptr<const Index> index_;
  std::string load_error_;
  httplib::Server server_;
  std::thread worker_;
};

}  // namespace evir
