#pragma once

// Standalone HTML result page: the query image, then one section per ranked
// video with a timeline marking every matched frame.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "evir/codec.hpp"
#include "evir/video_rank.hpp"

namespace evir {

namespace fs = std::filesystem;

inline std::string base64_encode(std::span<const std::uint8_t> data) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == data.size()) {
    const std::uint32_t v = data[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == data.size()) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string data_uri(const PixelGrid& img) {
  return "data:image/png;base64," + base64_encode(encode_png(img));
}

struct ReportOptions {
  std::optional<PixelGrid> query_image;
  /// Directory holding original videos as <video_id>.<ext>. When a file is
  /// found the section embeds a player; otherwise the first indexed frame
  /// serves as a poster.
  std::optional<fs::path> media_root;
  int poster_width = 240;
};

/// Marker position in percent of the timeline, clamped to [0, 100].
inline double marker_percent(double timestamp, double duration) {
  if (!(duration > 0.0)) return 0.0;
  return std::clamp(100.0 * timestamp / duration, 0.0, 100.0);
}

namespace report_detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::optional<fs::path> find_media(const fs::path& root, const std::string& video_id) {
  for (const char* ext : {".mp4", ".webm", ".ogv", ".mov", ".mkv"}) {
    const fs::path p = root / (video_id + ext);
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return p;
  }
  return std::nullopt;
}

inline std::optional<PixelGrid> poster_for(const Index& idx, const std::string& video_id, int width) {
  const auto doc = idx.find_frame(video_id, 0);
  if (!doc) return std::nullopt;
  const FrameRecord& f = idx.frame(*doc);
  if (f.source.empty()) return std::nullopt;
  try {
    const PixelGrid img = load_image(f.source);
    if (img.width() <= width) return img;
    const int h = std::max(1, static_cast<int>(static_cast<long>(img.height()) * width / img.width()));
    return resize(img, width, h);
  } catch (const Error&) {
    return std::nullopt;
  }
}

constexpr std::string_view kStyle = R"(
body{font-family:sans-serif;margin:2em;color:#222;background:#fafafa}
.query img{max-width:320px;border:1px solid #999}
.video{margin:1.5em 0;padding:1em;background:#fff;border:1px solid #ddd}
.video h2{margin:0 0 .5em;font-size:1.1em}
.media img,.media video{max-width:320px;display:block;margin-bottom:.5em}
.timeline{position:relative;height:14px;background:#ccc;border-radius:3px;margin-top:18px}
.timeline .elapsed{position:absolute;left:0;top:0;bottom:0;background:#c33;border-radius:3px}
.marker{position:absolute;top:-12px;width:0;height:0;margin-left:-6px;border-left:6px solid transparent;border-right:6px solid transparent;border-top:10px solid #111}
.marker:hover::after{content:attr(data-label);position:absolute;top:-34px;left:-40px;white-space:nowrap;background:#333;color:#fff;padding:2px 6px;font-size:12px;border-radius:3px}
.empty{font-style:italic}
)";

}  // namespace report_detail

inline std::string render_report(const QueryResult& result, const Index& idx, const ReportOptions& opt = {}) {
  using report_detail::fmt;
  std::string h;
  h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  h += "<title>Results for " + html_escape(result.query_id.empty() ? "query" : result.query_id) + "</title>\n";
  h += "<style>" + std::string(report_detail::kStyle) + "</style>\n</head>\n<body>\n";
  h += "<header class=\"query\">\n<h1>Query " + html_escape(result.query_id) + "</h1>\n";
  h += "<p>Engine " + std::string(to_string(result.engine)) + ", " + fmt("%.1f", result.elapsed_ms) + " ms</p>\n";
  if (opt.query_image) h += "<img alt=\"query\" src=\"" + data_uri(*opt.query_image) + "\">\n";
  h += "</header>\n<main>\n";

  if (result.videos.empty()) h += "<p class=\"empty\">No matching videos.</p>\n";
  for (std::size_t i = 0; i < result.videos.size(); ++i) {
    const VideoHit& v = result.videos[i];
    const VideoRecord* rec = idx.find_video(v.video_id);
    const double duration = rec == nullptr ? 0.0 : rec->duration;
    h += "<section class=\"video\" data-video-id=\"" + html_escape(v.video_id) + "\">\n";
    h += "<h2>" + std::to_string(i + 1) + ". " + html_escape(v.video_id) + "</h2>\n";
    h += "<p>best score " + fmt("%.4f", v.best_score) + " at " + fmt("%.1f", v.best_frame.timestamp) + " s of " +
         fmt("%.1f", duration) + " s</p>\n<div class=\"media\">\n";
    std::optional<fs::path> media;
    if (opt.media_root) media = report_detail::find_media(*opt.media_root, v.video_id);
    const std::optional<PixelGrid> poster = report_detail::poster_for(idx, v.video_id, opt.poster_width);
    if (media) {
      h += "<video controls preload=\"none\" src=\"" + html_escape(media->string()) + "#t=" +
           fmt("%.1f", v.best_frame.timestamp) + "\"";
      if (poster) h += " poster=\"" + data_uri(*poster) + "\"";
      h += "></video>\n";
    } else if (poster) {
      h += "<img alt=\"poster\" src=\"" + data_uri(*poster) + "\">\n";
    }
    h += "</div>\n<div class=\"timeline\">";
    if (!v.matches.empty()) {
      h += "<div class=\"elapsed\" style=\"width:" + fmt("%.4f", marker_percent(v.matches.back().timestamp, duration)) +
           "%\"></div>";
    }
    for (const MatchedFrame& m : v.matches) {
      const std::string label = fmt("%.1f s", m.timestamp) + ", score " + fmt("%.4f", m.score);
      h += "<span class=\"marker\" style=\"left:" + fmt("%.4f", marker_percent(m.timestamp, duration)) +
           "%\" data-timestamp=\"" + fmt("%g", m.timestamp) + "\" data-score=\"" + fmt("%.6f", m.score) +
           "\" data-label=\"" + html_escape(label) + "\" title=\"" + html_escape(label) + "\"></span>";
    }
    h += "</div>\n</section>\n";
  }
  h += "</main>\n</body>\n</html>\n";
  return h;
}

}  // namespace evir
