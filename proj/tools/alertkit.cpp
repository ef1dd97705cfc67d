// alertkit command-line front end.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "alertkit/ingest.hpp"
#include "alertkit/pipeline.hpp"

using namespace alertkit;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> input, labels, signatures, dialects, stage_mapping, ip_map, out;
  std::optional<double> threshold, interval_time, group_threshold, alert_threshold, dedupe_window,
      episode_gap, test_window;
  std::optional<unsigned> jobs;
  bool quiet = false;
};

// Precedence: flag > environment > config file > defaults.
PipelineConfig resolve(const Flags& f) {
  PipelineConfig cfg;
  if (!f.config.empty()) cfg = load_config_file(f.config, cfg);
  if (const char* env = std::getenv("ALERTKIT_DATA_ROOT"); env && *env) cfg.input_root = env;
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  set(cfg.input_root, f.input);
  set(cfg.labels, f.labels);
  set(cfg.signatures, f.signatures);
  set(cfg.dialects, f.dialects);
  set(cfg.stage_mapping, f.stage_mapping);
  set(cfg.ip_map, f.ip_map);
  set(cfg.out_dir, f.out);
  set(cfg.score_threshold, f.threshold);
  set(cfg.interval_time, f.interval_time);
  set(cfg.group_threshold, f.group_threshold);
  set(cfg.alert_threshold, f.alert_threshold);
  set(cfg.dedupe_window, f.dedupe_window);
  set(cfg.episode_gap, f.episode_gap);
  set(cfg.test_window_duration, f.test_window);
  set(cfg.jobs, f.jobs);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alertkit: IDS alert normalization, scoring, filtering, aggregation and attack graphs"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--input", f.input, "Data root: <root>/<scenario>/<ids>/<file>");
  app.add_option("--labels", f.labels, "Scenario label file (JSON)");
  app.add_option("--signatures", f.signatures, "Signature table (default: bundled)");
  app.add_option("--dialects", f.dialects, "Dialect manifest (default: bundled)");
  app.add_option("--stage-mapping", f.stage_mapping, "Detector to stage mapping (default: bundled)");
  app.add_option("--ip-map", f.ip_map, "Per-scenario address remapping (JSON)");
  app.add_option("--out", f.out, "Output directory (default: out)");
  app.add_option("--threshold", f.threshold, "Detection score threshold (default 0.7)");
  app.add_option("--interval-time", f.interval_time, "Group gap in seconds (default 2)");
  app.add_option("--group-threshold", f.group_threshold, "Group similarity threshold (default 0.55)");
  app.add_option("--alert-threshold", f.alert_threshold, "Alert similarity threshold (default 0.5)");
  app.add_option("--dedupe-window", f.dedupe_window, "Duplicate window in seconds (default 2)");
  app.add_option("--episode-gap", f.episode_gap, "Episode gap in seconds (default 7200)");
  app.add_option("--test-window", f.test_window, "Test window length in seconds (default 18000)");
  app.add_option("--jobs", f.jobs, "Parallel parse workers");
  app.add_flag("-q,--quiet", f.quiet, "Suppress progress messages");

  using Cmd = nlohmann::json (*)(const PipelineConfig&, const Logger&);
  const std::pair<const char*, Cmd> commands[] = {
      {"normalize", cmd_normalize}, {"score", cmd_score},   {"filter", cmd_filter},
      {"aggregate", cmd_aggregate}, {"graph", cmd_graph},   {"report", cmd_report},
  };
  const char* help[] = {
      "Parse raw alerts into the normalized store",
      "Score detectors against the scenario labels",
      "Keep alerts of high-scoring detectors inside attack phases",
      "Group alerts and merge groups into meta-alerts",
      "Build per-victim attack graphs as DOT files",
      "Summarize all artifacts present in the output directory",
  };
  for (std::size_t i = 0; i < std::size(commands); ++i) app.add_subcommand(commands[i].first, help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  Logger log;
  if (!f.quiet) log = [](const std::string& m) { std::cerr << "alertkit: " << m << '\n'; };
  try {
    auto cfg = resolve(f);
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) {
        std::cout << fn(cfg, log).dump(2) << '\n';
        return kExitOk;
      }
    }
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "ingest error: " << e.what() << '\n';
    return kExitIngest;
  } catch (const IngestError& e) {
    std::cerr << "ingest error: " << e.what() << '\n';
    return kExitIngest;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitProcessing;
  }
}
