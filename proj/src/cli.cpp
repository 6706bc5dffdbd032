#include "mpstream/cli.hpp"

#include "mpstream/core.hpp"
#include "mpstream/csv.hpp"
#include "mpstream/detector.hpp"
#include "mpstream/eval.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace mpstream::cli {

namespace {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level() {
  const char* env = std::getenv("MPSTREAM_LOG");
  if (!env) return LogLevel::kWarn;
  const std::string v(env);
  if (v == "error" || v == "quiet") return LogLevel::kError;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

void log(std::ostream& err, LogLevel level, const std::string& message) {
  static constexpr const char* kTag[] = {"error", "warning", "info", "debug"};
  if (level <= log_level()) err << "mpstream: " << kTag[static_cast<int>(level)] << ": " << message << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "' for reading");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw DataError("failed writing '" + path + "'");
}

TimeSeries<double> to_series(const DatasetTable& table) {
  const double rate = table.size() > 1 && table.t_s[1] > table.t_s[0] ? 1.0 / (table.t_s[1] - table.t_s[0]) : 1.0;
  Vector<double> v = Eigen::Map<const Vector<double>>(table.values.data(), static_cast<Eigen::Index>(table.size()));
  return TimeSeries<double>(std::move(v), rate);
}

}  // namespace

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

void cmd_generate(const RunConfig& config, const GenerateArgs& args, std::ostream& log_stream) {
  LabeledDataset dataset = [&] {
    try {
      return generate_dataset(config);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  const std::string truth_path = args.truth_out.value_or(sibling_path(args.out, ".truth.csv"));
  {
    auto f = open_out(args.out);
    write_dataset(f, dataset);
    finish(f, args.out);
  }
  {
    auto f = open_out(truth_path);
    write_truth(f, dataset.truth);
    finish(f, truth_path);
  }
  log(log_stream, LogLevel::kInfo,
      "wrote " + std::to_string(dataset.channel.size()) + " samples with " + std::to_string(dataset.truth.size()) +
          " labeled segments to " + args.out + " (truth: " + truth_path + ")");
}

void cmd_detect(const RunConfig& config, const DetectArgs& args, std::ostream& log_stream) {
  auto in = open_in(args.in);
  const DatasetTable table = read_dataset(in);

  Detector detector(config.detector);
  std::vector<DetectionEvent> events;
  std::vector<std::optional<double>> profile(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto step = detector.step(table.values[i]);
    if (const auto& u = detector.last_update()) profile[u->position] = u->distance;
    events.insert(events.end(), step.begin(), step.end());
  }
  if (!detector.threshold()) {
    log(log_stream, LogLevel::kWarn,
        "input has " + std::to_string(table.size()) +
            " samples, fewer than the detector warm-up/calibration period; no detection performed");
  } else {
    log(log_stream, LogLevel::kInfo, "threshold " + format_exact(*detector.threshold()));
  }

  {
    auto f = open_out(args.out);
    write_events(f, events);
    finish(f, args.out);
  }
  const std::string profile_path = args.profile_out.value_or(sibling_path(args.out, ".profile.csv"));
  {
    auto f = open_out(profile_path);
    write_profile_trace(f, table, profile);
    finish(f, profile_path);
  }
  log(log_stream, LogLevel::kInfo, std::to_string(events.size()) + " events written to " + args.out);
}

void cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  auto events_in = open_in(args.events);
  const auto events = read_events(events_in);
  auto truth_in = open_in(args.truth);
  const auto truth = read_truth(truth_in);

  for (const auto& e : events) {
    if (e.position >= args.n) {
      throw DataError("event at position " + std::to_string(e.position) + " lies beyond n = " +
                      std::to_string(args.n));
    }
  }
  for (const auto& s : truth) {
    if (s.end > args.n) {
      throw DataError("truth segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                      ") lies beyond n = " + std::to_string(args.n));
    }
  }
  std::vector<AnomalySegment> pred;
  try {
    pred = events_to_segments(events, args.n);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  const EvaluationReport report = evaluate(pred, truth, args.n);
  out << render_report(report);
  if (args.out) {
    auto f = open_out(*args.out);
    write_report(f, report);
    finish(f, *args.out);
  }
}

void cmd_profile(const RunConfig& config, const ProfileArgs& args, std::ostream& out) {
  auto in = open_in(args.in);
  const DatasetTable table = read_dataset(in);
  const WindowSize w = config.detector.window;
  if (table.size() < w.m) {
    throw DataError("input has " + std::to_string(table.size()) + " samples, fewer than the window " +
                    std::to_string(w.m));
  }
  const ExclusionZone ez = args.exclusion_radius ? ExclusionZone(*args.exclusion_radius)
                                                 : config.detector.exclusion_zone();
  const auto series = to_series(table);
  const auto mp = matrix_profile_batch(series, w, ez, {Metric::kZNormalized, ProfileSide::kTwoSided, config.threads});
  auto f = open_out(args.out);
  write_matrix_profile(f, mp);
  finish(f, args.out);
  if (args.discords > 0) {
    for (const auto& d : discords(mp, args.discords, ez)) {
      out << "discord " << d.position << " " << format_exact(d.distance) << '\n';
    }
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming Matrix Profile anomaly detection"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> window;
  std::optional<unsigned> threads;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--seed", seed, "generator seed (overrides config)");
    sub->add_option("--window", window, "subsequence length m (overrides config)")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--threads", threads, "threads for batch profiles")->check(CLI::Range(1, 1024));
  };

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "write a labeled synthetic dataset and its truth sidecar");
  add_common(gen);
  gen->add_option("--out", gen_args.out, "dataset CSV")->required();
  gen->add_option("--truth-out", gen_args.truth_out, "truth sidecar CSV");

  DetectArgs det_args;
  auto* det = app.add_subcommand("detect", "stream a dataset through the detector");
  add_common(det);
  det->add_option("--in", det_args.in, "dataset CSV")->required();
  det->add_option("--out", det_args.out, "events CSV")->required();
  det->add_option("--profile-out", det_args.profile_out, "per-sample profile trace CSV");

  EvaluateArgs eval_args;
  auto* ev = app.add_subcommand("evaluate", "score detected events against truth segments");
  add_common(ev);
  ev->add_option("--events", eval_args.events, "events CSV")->required();
  ev->add_option("--truth", eval_args.truth, "truth sidecar CSV")->required();
  ev->add_option("--n", eval_args.n, "stream length in samples")->required();
  ev->add_option("--out", eval_args.out, "report CSV");

  ProfileArgs prof_args;
  auto* prof = app.add_subcommand("profile", "batch Matrix Profile of a dataset CSV");
  add_common(prof);
  prof->add_option("--in", prof_args.in, "dataset CSV")->required();
  prof->add_option("--out", prof_args.out, "profile CSV")->required();
  prof->add_option("--discords", prof_args.discords, "number of discords to print");
  prof->add_option("--exclusion", prof_args.exclusion_radius, "exclusion-zone radius (default ceil(m/4))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    RunConfig config = config_path ? load_config(*config_path) : RunConfig{};
    if (seed) config.generator.seed = *seed;
    if (window) config.detector.window = WindowSize(*window);
    if (threads) config.threads = *threads;
    config.validate();

    if (gen->parsed()) cmd_generate(config, gen_args, err);
    else if (det->parsed()) cmd_detect(config, det_args, err);
    else if (ev->parsed()) cmd_evaluate(eval_args, out);
    else if (prof->parsed()) cmd_profile(config, prof_args, out);
    return kSuccess;
  } catch (const ConfigError& e) {
    log(err, LogLevel::kError, e.what());
    return kUsageError;
  } catch (const DataError& e) {
    log(err, LogLevel::kError, e.what());
    return kDataError;
  } catch (const std::invalid_argument& e) {
    log(err, LogLevel::kError, e.what());
    return kDataError;
  }
}

}  // namespace mpstream::cli
