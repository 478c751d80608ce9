#pragma once

// The `evir` command line: index, vocab, search, eval, serve, gen-corpus.
// Exit status 0 on success, 1 on runtime failure, 2 on usage errors.
// Every long option can also come from an EVIR_<OPTION> environment variable
// or from a TOML/INI file given with --config.

#include <atomic>
#include <cctype>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "evir/index_io.hpp"
#include "evir/report.hpp"
#include "evir/server.hpp"
#include "evir/synth.hpp"

namespace evir {

namespace cli {

inline std::atomic<bool> g_stop{false};

inline void on_signal(int) { g_stop = true; }

/// Writes to --out when given, otherwise to `out`.
inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
    out.flush();
    return;
  }
  write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string format_result_text(const QueryResult& r, const Index& idx) {
  std::ostringstream s;
  s << std::fixed;
  s << "query " << (r.query_id.empty() ? "-" : r.query_id) << "  engine " << to_string(r.engine) << "  "
    << std::setprecision(1) << r.elapsed_ms << " ms\n";
  if (r.videos.empty()) s << "no matching videos\n";
  for (std::size_t i = 0; i < r.videos.size(); ++i) {
    const VideoHit& v = r.videos[i];
    s << i + 1 << ". " << v.video_id << "  score " << std::setprecision(4) << v.best_score << "  best "
      << std::setprecision(1) << v.best_frame.timestamp << " s of " << video_duration(&idx, v.video_id)
      << " s  matches";
    for (double t : v.matched_timestamps) s << ' ' << std::setprecision(1) << t;
    s << '\n';
  }
  return s.str();
}

inline std::string upper_env(const std::string& name) {
  std::string out = "EVIR_";
  for (char c : name) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

/// Gives every long option of `app` and its subcommands an environment name.
inline void attach_env(CLI::App& app) {
  for (CLI::Option* o : app.get_options()) {
    const auto& names = o->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config" || o->get_positional()) continue;
    if (o->get_envname().empty()) o->envname(upper_env(names.front()));
  }
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) attach_env(*sub);
}

struct IndexArgs {
  std::string manifest;
  std::string out;
  std::string vocab;
  float fps = 5.0f;
  float threshold = DetectorParams{}.threshold;
  std::uint64_t seed = 42;
  std::uint32_t max_iter = 50;
  std::uint32_t budget = 200000;
  std::string decoder;
  std::string cache_dir;
  unsigned threads = 0;
  bool quiet = false;
};

inline void add_build_options(CLI::App* cmd, IndexArgs& a) {
  cmd->add_option("--manifest,-m", a.manifest, "Corpus manifest (video_id<TAB>source[<TAB>duration])")->required();
  cmd->add_option("--fps", a.fps, "Sampling rate in frames per second")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", a.threshold, "Keypoint detector response threshold")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Vocabulary training seed")->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "k-means iteration limit")->capture_default_str();
  cmd->add_option("--sample-budget", a.budget, "Local descriptors sampled for vocabulary training")->capture_default_str();
  cmd->add_option("--decoder", a.decoder, "Shell template decoding video files: {input} {fps} {outdir}");
  cmd->add_option("--cache-dir", a.cache_dir, "Directory for decoded frames");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_flag("--quiet,-q", a.quiet, "No progress messages");
}

inline BuildOptions build_options(const IndexArgs& a, std::ostream& err) {
  BuildOptions o;
  o.config.sampling_fps = a.fps;
  o.config.detector.threshold = a.threshold;
  o.config.vocab_seed = a.seed;
  o.config.vocab_max_iter = a.max_iter;
  o.config.vocab_sample_budget = a.budget;
  o.decoder.command = a.decoder;
  if (!a.cache_dir.empty()) o.decoder.cache_dir = a.cache_dir;
  o.threads = a.threads;
  if (!a.quiet) o.log = [&err](const std::string& m) { err << "evir: " << m << '\n'; };
  return o;
}

inline std::vector<Engine> parse_engine_list(const std::string& s) {
  std::vector<Engine> out;
  for (char c : s) {
    if (c == ',' || c == ' ') continue;
    const auto e = parse_engine(std::string_view(&c, 1));
    if (!e) throw CLI::ValidationError("--engines", std::string("unknown engine '") + c + "'");
    out.push_back(*e);
  }
  if (out.empty()) throw CLI::ValidationError("--engines", "no engine given");
  return out;
}

}  // namespace cli

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Query-by-image video retrieval", "evir"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file with option values");

  // index
  cli::IndexArgs ix;
  CLI::App* index_cmd = app.add_subcommand("index", "Build an index file from a corpus manifest");
  cli::add_build_options(index_cmd, ix);
  index_cmd->add_option("--out,-o", ix.out, "Index file to write")->required();
  index_cmd->add_option("--vocab", ix.vocab, "Use this vocabulary file instead of training one")->check(CLI::ExistingFile);

  // vocab
  cli::IndexArgs vx;
  std::string vocab_from_index;
  CLI::App* vocab_cmd = app.add_subcommand("vocab", "Train a vocabulary from a manifest, or export one from an index");
  cli::add_build_options(vocab_cmd, vx);
  vocab_cmd->get_option("--manifest")->required(false);
  auto* from_index = vocab_cmd->add_option("--index", vocab_from_index, "Export the vocabulary of this index")
                         ->check(CLI::ExistingFile);
  from_index->excludes(vocab_cmd->get_option("--manifest"));
  vocab_cmd->add_option("--out,-o", vx.out, "Vocabulary file to write")->required();

  // search
  std::string search_index, search_image, search_engine = "A", search_format = "text", search_out, search_report,
                                          media_root;
  std::size_t search_n = 50, frame_cap = 10, video_cap = 3;
  unsigned search_threads = 0;
  CLI::App* search_cmd = app.add_subcommand("search", "Rank videos for one query image");
  search_cmd->add_option("--index,-i", search_index, "Index file")->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--image", search_image, "Query image (PNG or JPEG)")->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--engine,-e", search_engine, "A (sum of ranks), B (sum of scores) or C (visual words)")
      ->capture_default_str()
      ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
  search_cmd->add_option("--top-n", search_n, "Per-model list length")->capture_default_str()->check(CLI::PositiveNumber);
  search_cmd->add_option("--frame-cap", frame_cap, "Fused frames aggregated into videos")->capture_default_str()->check(CLI::PositiveNumber);
  search_cmd->add_option("--video-cap", video_cap, "Videos returned")->capture_default_str()->check(CLI::PositiveNumber);
  search_cmd->add_option("--format", search_format, "text or json")->capture_default_str()->check(CLI::IsMember({"text", "json"}));
  search_cmd->add_option("--report", search_report, "Also write an HTML report here");
  search_cmd->add_option("--media-root", media_root, "Directory of original videos for the report");
  search_cmd->add_option("--threads", search_threads, "Scan threads (0 = all cores)")->capture_default_str();
  search_cmd->add_option("--out,-o", search_out, "Write results here instead of standard output");

  // eval
  std::string eval_index, eval_queries, eval_gt, eval_engines = "ABC", eval_out, eval_records;
  std::size_t eval_n = 50;
  unsigned eval_threads = 0;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Precision at positions 1 to 3 over a query set");
  eval_cmd->add_option("--index,-i", eval_index, "Index file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--queries", eval_queries, "Directory of query images (id = file stem)")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--gt", eval_gt, "Ground truth (query_id<TAB>video_id)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--engines", eval_engines, "Engines to evaluate, e.g. ABC")->capture_default_str();
  eval_cmd->add_option("--top-n", eval_n, "Per-model list length")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--records", eval_records, "Write one JSON record per query and engine here");
  eval_cmd->add_option("--threads", eval_threads, "Query threads (0 = all cores)")->capture_default_str();
  eval_cmd->add_option("--out,-o", eval_out, "Write the table here instead of standard output");

  // serve
  std::string serve_index, serve_host = "127.0.0.1";
  int serve_port = 8080;
  unsigned serve_threads = 0;
  CLI::App* serve_cmd = app.add_subcommand("serve", "HTTP search service");
  serve_cmd->add_option("--index,-i", serve_index, "Index file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", serve_host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port,-p", serve_port, "Listen port (0 = any free port)")->capture_default_str()->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--threads", serve_threads, "Scan threads per request (0 = all cores)")->capture_default_str();

  // gen-corpus
  SynthConfig synth;
  std::string synth_out;
  CLI::App* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic corpus with query sets and ground truth");
  gen_cmd->add_option("--out,-o", synth_out, "Output directory")->required();
  gen_cmd->add_option("--videos", synth.videos, "Number of videos")->capture_default_str();
  gen_cmd->add_option("--frames", synth.frames, "Frames per video")->capture_default_str();
  gen_cmd->add_option("--width", synth.width, "Frame width")->capture_default_str();
  gen_cmd->add_option("--height", synth.height, "Frame height")->capture_default_str();
  gen_cmd->add_option("--fps", synth.fps, "Frame rate the corpus is meant to be sampled at")->capture_default_str();
  gen_cmd->add_option("--queries-per-video", synth.queries_per_video, "Queries drawn from each video")->capture_default_str();
  gen_cmd->add_option("--jpeg-quality", synth.jpeg_quality, "Quality of the near-duplicate queries")->capture_default_str();
  gen_cmd->add_option("--brightness-jitter", synth.brightness_jitter, "Relative brightness jitter of near-duplicates")->capture_default_str();
  gen_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

  cli::attach_env(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    const auto active = app.get_subcommands();
    err << "evir: " << e.what() << "\n\n" << (active.empty() ? app.help() : active.front()->help());
    return 2;
  }

  try {
    if (index_cmd->parsed()) {
      BuildOptions o = cli::build_options(ix, err);
      if (!ix.vocab.empty()) o.vocabulary = deserialize_vocabulary(read_file(ix.vocab));
      BuildReport rep;
      const Index idx = build_index(load_manifest(ix.manifest), o, &rep);
      persist(idx, ix.out);
      out << "indexed " << rep.frames << " frames from " << rep.videos << " videos (" << rep.local_descriptors
          << " local descriptors) in " << std::fixed << std::setprecision(1) << rep.seconds << " s -> " << ix.out
          << '\n';
    } else if (vocab_cmd->parsed()) {
      Vocabulary vocab;
      if (!vocab_from_index.empty()) {
        vocab = load_index(vocab_from_index).vocabulary();
        if (vocab.empty()) fail(ErrorCode::VocabularyMissing, vocab_from_index + " holds no vocabulary");
      } else if (!vx.manifest.empty()) {
        vocab = train_corpus_vocabulary(load_manifest(vx.manifest), cli::build_options(vx, err));
      } else {
        err << "vocab: either --manifest or --index is required\n" << vocab_cmd->help();
        return 2;
      }
      write_file(vx.out, serialize_vocabulary(vocab));
      out << "vocabulary of " << vocab.size() << " words (" << vocab.iterations_run() << " iterations) -> " << vx.out
          << '\n';
    } else if (search_cmd->parsed()) {
      const Index idx = load_index(search_index);
      SearchOptions opt;
      opt.engine = *parse_engine(search_engine);
      opt.n = search_n;
      opt.caps = {frame_cap, video_cap};
      opt.threads = search_threads;
      const PixelGrid query = load_image(search_image);
      const QueryResult r = search_videos(idx, query, opt, fs::path(search_image).stem().string());
      cli::emit(search_format == "json" ? to_json(r, &idx).dump(2) + "\n" : cli::format_result_text(r, idx),
                search_out, out);
      if (!search_report.empty()) {
        ReportOptions ro;
        ro.query_image = query;
        if (!media_root.empty()) ro.media_root = fs::path(media_root);
        const std::string html = render_report(r, idx, ro);
        write_file(search_report, std::span(reinterpret_cast<const std::uint8_t*>(html.data()), html.size()));
      }
    } else if (eval_cmd->parsed()) {
      const std::vector<Engine> engines = cli::parse_engine_list(eval_engines);
      const Index idx = load_index(eval_index);
      const GroundTruth gt = load_ground_truth(eval_gt);
      const std::vector<QueryImage> queries = load_queries(eval_queries);
      SearchOptions opt;
      opt.n = eval_n;
      opt.threads = eval_threads;
      const std::vector<EngineEvaluation> evals = evaluate(idx, queries, gt, engines, opt);
      cli::emit(format_table(evals), eval_out, out);
      if (!eval_records.empty()) {
        const std::string records = format_records(evals);
        write_file(eval_records, std::span(reinterpret_cast<const std::uint8_t*>(records.data()), records.size()));
      }
    } else if (serve_cmd->parsed()) {
      ServiceOptions so;
      so.search_threads = serve_threads;
      SearchService service(so);
      const int port = service.bind(serve_host, serve_port);
      service.start();
      err << "evir: listening on http://" << serve_host << ':' << port << " (loading " << serve_index << ")\n";
      std::thread loader([&] {
        try {
          service.set_index(std::make_shared<const Index>(load_index(serve_index)));
          err << "evir: index ready\n";
        } catch (const Error& e) {
          service.set_load_error(e.what());
          err << "evir: " << e.what() << '\n';
        }
      });
      cli::g_stop = false;
      auto previous_int = std::signal(SIGINT, cli::on_signal);
      auto previous_term = std::signal(SIGTERM, cli::on_signal);
      while (!cli::g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      std::signal(SIGINT, previous_int);
      std::signal(SIGTERM, previous_term);
      loader.join();
      service.stop();
    } else if (gen_cmd->parsed()) {
      const SynthCorpus c = write_synth_corpus(synth, synth_out);
      out << "wrote " << c.frames << " frames and " << c.queries << " queries per set to " << c.root.string() << '\n'
          << "  manifest      " << c.manifest.string() << '\n'
          << "  ground truth  " << c.ground_truth.string() << '\n'
          << "  exact queries " << c.exact_queries.string() << '\n'
          << "  near queries  " << c.near_queries.string() << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    err << "evir: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "evir: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "evir: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace evir
