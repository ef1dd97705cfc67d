#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "alertkit/aggregation.hpp"
#include "alertkit/filtering.hpp"
#include "alertkit/graph.hpp"
#include "alertkit/model.hpp"

namespace alertkit {

/// Processing failures that are neither configuration nor ingest problems.
class ProcessingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitIngest = 3,
  kExitProcessing = 4,
};

struct PipelineConfig {
  std::string input_root;
  std::string labels;
  std::string signatures;     // empty: bundled table
  std::string dialects;       // empty: bundled manifest
  std::string stage_mapping;  // empty: bundled mapping
  std::string ip_map;         // empty: no remapping
  std::string out_dir = "out";

  double score_threshold = kDefaultScoreThreshold;
  double interval_time = kDefaultIntervalTime;
  double group_threshold = kDefaultGroupThreshold;
  double alert_threshold = kDefaultAlertThreshold;
  double dedupe_window = kDefaultDedupeWindow;
  double episode_gap = kDefaultEpisodeGap;
  double test_window_duration = kDefaultTestWindowSeconds;
  SimilarityWeights weights;
  std::size_t min_node_support = 0;
  unsigned jobs = 1;
};

/// Overlays keys of a JSON config document onto `base`. Unknown keys are a
/// ConfigError. Relative paths are resolved against `base_dir`.
PipelineConfig apply_config_json(PipelineConfig base, const nlohmann::json& doc,
                                 const std::string& base_dir = "");
PipelineConfig load_config_file(const std::string& path, PipelineConfig base = {});

/// Range checks; `require` names the paths the calling command needs.
struct Requirements {
  bool input_root = false;
  bool labels = false;
};
void validate(const PipelineConfig& cfg, Requirements require = {});

/// File names inside out_dir.
namespace artifacts {
inline constexpr const char* kAlerts = "alerts.ndjson";
inline constexpr const char* kIngestStats = "ingest_stats.json";
inline constexpr const char* kScoresCsv = "scores.csv";
inline constexpr const char* kScoresJson = "scores.json";
inline constexpr const char* kRatesCsv = "rates.csv";
inline constexpr const char* kFiltered = "filtered.ndjson";
inline constexpr const char* kFilterCsv = "filter_report.csv";
inline constexpr const char* kFilterTxt = "filter_report.txt";
inline constexpr const char* kFilterJson = "filter_report.json";
inline constexpr const char* kMetaAlerts = "meta_alerts.ndjson";
inline constexpr const char* kMetaSummary = "meta_alerts.txt";
inline constexpr const char* kAggregateStats = "aggregate_stats.json";
inline constexpr const char* kGraphDir = "graphs";
inline constexpr const char* kGraphIndex = "graphs/index.csv";
inline constexpr const char* kGraphStats = "graph_stats.json";
inline constexpr const char* kSummaryJson = "summary.json";
inline constexpr const char* kSummaryTxt = "summary.txt";
}  // namespace artifacts

using Logger = std::function<void(const std::string&)>;

nlohmann::json cmd_normalize(const PipelineConfig& cfg, const Logger& log = {});
nlohmann::json cmd_score(const PipelineConfig& cfg, const Logger& log = {});
nlohmann::json cmd_filter(const PipelineConfig& cfg, const Logger& log = {});
nlohmann::json cmd_aggregate(const PipelineConfig& cfg, const Logger& log = {});
nlohmann::json cmd_graph(const PipelineConfig& cfg, const Logger& log = {});
nlohmann::json cmd_report(const PipelineConfig& cfg, const Logger& log = {});

nlohmann::json to_json(const FilterReport& report);
FilterReport filter_report_from_json(const nlohmann::json& j);

/// File-system-safe name for a victim's DOT file.
std::string safe_file_name(const std::string& name);

}  // namespace alertkit
