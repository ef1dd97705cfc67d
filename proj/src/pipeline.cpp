#include "alertkit/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alertkit/ingest.hpp"
#include "alertkit/scoring.hpp"
#include "alertkit/store.hpp"
#include "alertkit/taxonomy.hpp"

namespace alertkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).string();
}

std::string out_path(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ProcessingError("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProcessingError("missing artifact " + path + " (run the earlier stage first)");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ProcessingError("corrupt artifact " + path + ": " + e.what());
  }
}

void ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
}

const SignatureTable& signature_table(const PipelineConfig& cfg, SignatureTable& storage) {
  if (cfg.signatures.empty()) return SignatureTable::builtin();
  storage = SignatureTable::load(cfg.signatures);
  return storage;
}

void note(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

void require_alert_store(const std::string& path) {
  if (!fs::exists(path)) throw ProcessingError("missing artifact " + path + " (run the earlier stage first)");
}

}  // namespace

PipelineConfig apply_config_json(PipelineConfig cfg, const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "input_root") cfg.input_root = resolve(base_dir, v.get<std::string>());
      else if (key == "labels") cfg.labels = resolve(base_dir, v.get<std::string>());
      else if (key == "signatures") cfg.signatures = resolve(base_dir, v.get<std::string>());
      else if (key == "dialects") cfg.dialects = resolve(base_dir, v.get<std::string>());
      else if (key == "stage_mapping") cfg.stage_mapping = resolve(base_dir, v.get<std::string>());
      else if (key == "ip_map") cfg.ip_map = resolve(base_dir, v.get<std::string>());
      else if (key == "out_dir") cfg.out_dir = resolve(base_dir, v.get<std::string>());
      else if (key == "score_threshold") cfg.score_threshold = v.get<double>();
      else if (key == "interval_time") cfg.interval_time = v.get<double>();
      else if (key == "group_threshold") cfg.group_threshold = v.get<double>();
      else if (key == "alert_threshold") cfg.alert_threshold = v.get<double>();
      else if (key == "dedupe_window") cfg.dedupe_window = v.get<double>();
      else if (key == "episode_gap") cfg.episode_gap = v.get<double>();
      else if (key == "test_window_duration") cfg.test_window_duration = v.get<double>();
      else if (key == "min_node_support") cfg.min_node_support = v.get<std::size_t>();
      else if (key == "jobs") cfg.jobs = v.get<unsigned>();
      else if (key == "similarity_weights") {
        cfg.weights.detectors = v.value("detectors", cfg.weights.detectors);
        cfg.weights.frequency = v.value("frequency", cfg.weights.frequency);
        cfg.weights.sequence = v.value("sequence", cfg.weights.sequence);
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config_file(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return apply_config_json(std::move(base), doc, fs::path(path).parent_path().string());
}

void validate(const PipelineConfig& cfg, Requirements require) {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  unit(cfg.score_threshold, "score_threshold");
  unit(cfg.group_threshold, "group_threshold");
  unit(cfg.alert_threshold, "alert_threshold");
  positive(cfg.interval_time, "interval_time");
  positive(cfg.dedupe_window, "dedupe_window");
  positive(cfg.episode_gap, "episode_gap");
  positive(cfg.test_window_duration, "test_window_duration");
  if (cfg.weights.detectors < 0 || cfg.weights.frequency < 0 || cfg.weights.sequence < 0 ||
      !(cfg.weights.detectors + cfg.weights.frequency + cfg.weights.sequence > 0))
    throw ConfigError("similarity weights must be non-negative with a positive sum");
  if (cfg.jobs == 0) throw ConfigError("jobs must be at least 1");
  if (cfg.out_dir.empty()) throw ConfigError("output directory not set");
  if (require.input_root && cfg.input_root.empty()) throw ConfigError("input root not set");
  if (require.labels && cfg.labels.empty()) throw ConfigError("scenario label file not set");
  auto exists = [](const std::string& p, const char* what) {
    if (!p.empty() && !fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p);
  };
  if (require.input_root) exists(cfg.input_root, "input root");
  if (require.labels) exists(cfg.labels, "label file");
  exists(cfg.signatures, "signature table");
  exists(cfg.dialects, "dialect manifest");
  exists(cfg.stage_mapping, "stage mapping");
  exists(cfg.ip_map, "ip map");
}

json cmd_normalize(const PipelineConfig& cfg, const Logger& log) {
  validate(cfg, {.input_root = true});
  if (!fs::is_directory(cfg.input_root)) throw ConfigError("input root is not a directory: " + cfg.input_root);
  ensure_out_dir(cfg);
  SignatureTable table_storage;
  const auto& table = signature_table(cfg, table_storage);
  DialectManifest manifest =
      cfg.dialects.empty() ? DialectManifest::builtin() : DialectManifest::load(cfg.dialects);

  IngestOptions opts;
  opts.jobs = cfg.jobs;
  opts.warn = log;
  AlertWriter writer(out_path(cfg, artifacts::kAlerts));
  IngestStats total;
  json per_scenario = json::object();
  for (const auto& scenario : list_scenarios(cfg.input_root)) {
    auto stats = load_scenario(cfg.input_root, scenario, table,
                               [&](Alert&& a) { writer.write(a); }, opts, manifest);
    per_scenario[scenario] = to_json(stats);
    total += stats;
    note(log, "normalized " + scenario + ": " + std::to_string(stats.total()) + " alerts");
  }
  json out = {{"format", "alertkit-ingest-stats"},
              {"version", 1},
              {"total", to_json(total)},
              {"scenarios", per_scenario}};
  write_json(out_path(cfg, artifacts::kIngestStats), out);
  return out;
}

json cmd_score(const PipelineConfig& cfg, const Logger& log) {
  validate(cfg, {.labels = true});
  ensure_out_dir(cfg);
  auto labels = load_labels(cfg.labels, cfg.test_window_duration);
  auto store = out_path(cfg, artifacts::kAlerts);
  require_alert_store(store);
  ScoreAccumulator acc(labels);
  read_alerts(store, [&](Alert&& a) { acc.add(a); });
  if (acc.unlabeled() > 0)
    note(log, std::to_string(acc.unlabeled()) + " alerts belong to scenarios without labels");
  auto report = acc.finalize();
  auto ranked = rank_detectors(report.rows);
  write_text(out_path(cfg, artifacts::kScoresCsv), scores_csv(ranked));
  write_text(out_path(cfg, artifacts::kRatesCsv), rates_csv(report.rates));
  write_json(out_path(cfg, artifacts::kScoresJson), scores_to_json(report.rows));
  auto kept = retained_detectors(report.rows, cfg.score_threshold);
  return {{"detectors", report.rows.size()},
          {"ranked", ranked.size()},
          {"above_threshold", kept.size()},
          {"unlabeled_alerts", acc.unlabeled()}};
}

json to_json(const FilterReport& report) {
  json scenarios = json::array();
  for (const auto& s : report.scenarios)
    scenarios.push_back({{"scenario", s.scenario}, {"counts", s.counts}});
  return {{"format", "alertkit-filter-report"},
          {"version", 1},
          {"scenarios", scenarios},
          {"average_reduction", report.average_reduction}};
}

FilterReport filter_report_from_json(const json& j) {
  FilterReport r;
  for (const auto& s : j.at("scenarios"))
    r.scenarios.push_back({s.at("scenario").get<std::string>(),
                           s.at("counts").get<std::array<std::size_t, 4>>()});
  r.average_reduction = j.at("average_reduction").get<std::array<double, 4>>();
  return r;
}

json cmd_filter(const PipelineConfig& cfg, const Logger& log) {
  validate(cfg, {.labels = true});
  ensure_out_dir(cfg);
  auto labels = load_labels(cfg.labels, cfg.test_window_duration);
  auto rows = scores_from_json(read_json(out_path(cfg, artifacts::kScoresJson)));
  auto store = out_path(cfg, artifacts::kAlerts);
  require_alert_store(store);
  AlertFilter filter(rows, cfg.score_threshold, labels);
  FilterReportBuilder builder(filter, labels);
  AlertWriter writer(out_path(cfg, artifacts::kFiltered));
  read_alerts(store, [&](Alert&& a) {
    if (builder.add(a)) writer.write(a);
  });
  auto report = builder.finish();
  write_text(out_path(cfg, artifacts::kFilterCsv), filter_report_csv(report));
  write_text(out_path(cfg, artifacts::kFilterTxt), filter_report_table(report));
  write_json(out_path(cfg, artifacts::kFilterJson), to_json(report));
  note(log, "kept " + std::to_string(writer.count()) + " alerts");
  return {{"kept", writer.count()},
          {"retained_detectors", retained_detectors(rows, cfg.score_threshold).size()}};
}

json cmd_aggregate(const PipelineConfig& cfg, const Logger& log) {
  validate(cfg);
  ensure_out_dir(cfg);
  auto store = out_path(cfg, artifacts::kFiltered);
  require_alert_store(store);
  auto alerts = read_all_alerts(store);
  auto groups = group_scenarios(alerts, cfg.interval_time);
  MergeOptions opts{cfg.group_threshold, cfg.alert_threshold, cfg.weights};
  auto metas = merge_into_meta_alerts(groups, opts);
  write_meta_alerts(out_path(cfg, artifacts::kMetaAlerts), metas);
  write_text(out_path(cfg, artifacts::kMetaSummary), render_meta_summary(metas));
  json per_scenario = json::object();
  for (const auto& g : groups) {
    auto& s = per_scenario[g.scenario];
    if (s.is_null()) s = {{"groups", 0}, {"alerts", 0}};
    s["groups"] = s["groups"].get<std::size_t>() + 1;
    s["alerts"] = s["alerts"].get<std::size_t>() + g.alerts.size();
  }
  json out = {{"format", "alertkit-aggregate-stats"},
              {"version", 1},
              {"alerts", alerts.size()},
              {"groups", groups.size()},
              {"meta_alerts", metas.size()},
              {"distinct_alerts", distinct_alert_count(metas)},
              {"scenarios", per_scenario}};
  write_json(out_path(cfg, artifacts::kAggregateStats), out);
  note(log, std::to_string(groups.size()) + " groups merged into " + std::to_string(metas.size()) +
                " meta-alerts");
  return out;
}

std::string safe_file_name(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

json cmd_graph(const PipelineConfig& cfg, const Logger& log) {
  validate(cfg);
  ensure_out_dir(cfg);
  StageMapping mapping =
      cfg.stage_mapping.empty() ? StageMapping::builtin() : StageMapping::load(cfg.stage_mapping);
  SignatureTable table_storage;
  mapping.check_total(signature_table(cfg, table_storage));
  auto store = out_path(cfg, artifacts::kFiltered);
  require_alert_store(store);
  auto alerts = read_all_alerts(store);
  if (!cfg.ip_map.empty()) {
    auto ip_map = load_ip_map(cfg.ip_map);
    alerts = remap_victims(alerts, ip_map, [&](const std::string& a) { note(log, "unmapped address " + a); });
  }
  std::stable_sort(alerts.begin(), alerts.end(),
                   [](const Alert& a, const Alert& b) { return a.timestamp < b.timestamp; });
  auto deduped = dedupe_window(alerts, cfg.dedupe_window);
  auto episodes = build_episodes(deduped, mapping, cfg.episode_gap);

  fs::create_directories(fs::path(cfg.out_dir) / artifacts::kGraphDir);
  std::ostringstream index;
  index << "victim,file,nodes,edges,attackers\n";
  json graphs = json::array();
  for (const auto& victim : victims_of(episodes)) {
    auto graph = build_graph(episodes, victim, {cfg.min_node_support});
    auto file = safe_file_name(victim) + ".dot";
    write_text((fs::path(cfg.out_dir) / artifacts::kGraphDir / file).string(), export_dot(graph));
    index << victim << ',' << file << ',' << graph.nodes.size() << ',' << graph.edges.size() << ','
          << graph.terminal.size() << '\n';
    graphs.push_back({{"victim", victim},
                      {"file", file},
                      {"nodes", graph.nodes.size()},
                      {"edges", graph.edges.size()},
                      {"attackers", graph.terminal.size()}});
  }
  write_text(out_path(cfg, artifacts::kGraphIndex), index.str());

  json per_scenario = json::object();
  for (const auto& a : alerts) {
    auto& s = per_scenario[a.scenario];
    if (s.is_null()) s = {{"alerts", 0}, {"after_dedupe", 0}};
    s["alerts"] = s["alerts"].get<std::size_t>() + 1;
  }
  for (const auto& a : deduped)
    per_scenario[a.scenario]["after_dedupe"] = per_scenario[a.scenario]["after_dedupe"].get<std::size_t>() + 1;
  json out = {{"format", "alertkit-graph-stats"},
              {"version", 1},
              {"alerts", alerts.size()},
              {"after_dedupe", deduped.size()},
              {"episodes", episodes.size()},
              {"graphs", graphs},
              {"scenarios", per_scenario}};
  write_json(out_path(cfg, artifacts::kGraphStats), out);
  return out;
}

json cmd_report(const PipelineConfig& cfg, const Logger& log) {
  validate(cfg);
  ensure_out_dir(cfg);
  auto optional_json = [&](const char* name) -> json {
    auto p = out_path(cfg, name);
    return fs::exists(p) ? read_json(p) : json();
  };
  json summary = {{"format", "alertkit-summary"}, {"version", 1}};

  auto ingest = optional_json(artifacts::kIngestStats);
  summary["ingest"] = ingest.is_null() ? json{{"total", 0}, {"alerts", json::object()}, {"parse_errors", 0}}
                                       : json{{"total", ingest["total"]["total"]},
                                              {"alerts", ingest["total"]["alerts"]},
                                              {"parse_errors", ingest["total"]["parse_errors"]}};

  auto filter = optional_json(artifacts::kFilterJson);
  std::map<std::string, std::size_t> filtered_per_scenario;
  json stages = json::object();
  if (!filter.is_null()) {
    auto report = filter_report_from_json(filter);
    for (auto stage : kAllStages) {
      auto i = static_cast<std::size_t>(stage);
      json row = json::object();
      for (const auto& s : report.scenarios) row[s.scenario] = s.counts[i];
      stages[std::string(stage_label(stage))] = {{"counts", row},
                                                 {"average_reduction", report.average_reduction[i]}};
    }
    for (const auto& s : report.scenarios) filtered_per_scenario[s.scenario] = s.counts[3];
  }
  summary["filter"] = stages;

  // Recount the filtered store so the report cross-checks the stage counts.
  auto filtered_store = out_path(cfg, artifacts::kFiltered);
  std::map<std::string, std::size_t> recount;
  if (fs::exists(filtered_store)) read_alerts(filtered_store, [&](Alert&& a) { ++recount[a.scenario]; });
  bool consistent = true;
  for (const auto& [s, n] : filtered_per_scenario) {
    auto it = recount.find(s);
    if ((it == recount.end() ? 0 : it->second) != n) consistent = false;
  }
  for (const auto& [s, n] : recount)
    if (!filtered_per_scenario.contains(s) || filtered_per_scenario[s] != n) consistent = false;
  summary["checks"] = {{"filtered_store_matches_report", consistent}};
  if (!consistent) note(log, "filtered store disagrees with the filter report");

  auto reduction_row = [&](auto count_for) {
    json row = json::object();
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [s, before] : filtered_per_scenario) {
      if (before == 0) continue;
      auto after = std::min(count_for(s), before);
      double r = reduction_rate(before, after);
      row[s] = {{"alerts", after}, {"reduction", r}};
      sum += r;
      ++n;
    }
    return json{{"scenarios", row}, {"average_reduction", n ? sum / n : 0.0}};
  };

  auto agg = optional_json(artifacts::kAggregateStats);
  if (agg.is_null()) {
    summary["aggregation"] = {{"groups", 0}, {"meta_alerts", 0}, {"distinct_alerts", 0}};
  } else {
    std::size_t distinct = agg["distinct_alerts"].get<std::size_t>();
    summary["aggregation"] = {{"groups", agg["groups"]},
                              {"meta_alerts", agg["meta_alerts"]},
                              {"distinct_alerts", distinct},
                              {"reduction", reduction_row([&](const std::string&) { return distinct; })}};
  }

  auto graph = optional_json(artifacts::kGraphStats);
  if (graph.is_null()) {
    summary["graph"] = {{"episodes", 0}, {"graphs", 0}, {"after_dedupe", 0}};
  } else {
    auto scen = graph["scenarios"];
    summary["graph"] = {{"episodes", graph["episodes"]},
                        {"graphs", graph["graphs"].size()},
                        {"after_dedupe", graph["after_dedupe"]},
                        {"reduction", reduction_row([&](const std::string& s) -> std::size_t {
                           return scen.contains(s) ? scen[s]["after_dedupe"].get<std::size_t>() : 0;
                         })}};
  }

  write_json(out_path(cfg, artifacts::kSummaryJson), summary);
  std::ostringstream txt;
  txt << "alerts ingested: " << summary["ingest"]["total"].dump() << '\n';
  for (const auto& [name, st] : stages.items())
    txt << name << ": average reduction " << render_percent(st["average_reduction"].get<double>())
        << "%\n";
  txt << "groups: " << summary["aggregation"]["groups"].dump()
      << ", meta-alerts: " << summary["aggregation"]["meta_alerts"].dump()
      << ", distinct alerts: " << summary["aggregation"]["distinct_alerts"].dump() << '\n';
  txt << "episodes: " << summary["graph"]["episodes"].dump()
      << ", graphs: " << summary["graph"]["graphs"].dump() << '\n';
  txt << "filtered store consistent: " << (consistent ? "yes" : "no") << '\n';
  write_text(out_path(cfg, artifacts::kSummaryTxt), txt.str());
  return summary;
}

}  // namespace alertkit
