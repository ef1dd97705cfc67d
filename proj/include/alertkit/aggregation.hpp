#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "alertkit/model.hpp"

namespace alertkit {

inline constexpr double kDefaultIntervalTime = 2.0;
inline constexpr double kDefaultGroupThreshold = 0.55;
inline constexpr double kDefaultAlertThreshold = 0.5;

using DetectorBag = std::map<DetectorId, std::size_t>;

/// Maximal run of alerts from one scenario with gaps <= the interval time.
struct AlertGroup {
  std::string scenario;
  std::size_t index = 0;  // position among the scenario's groups
  std::vector<Alert> alerts;
  double start = 0.0;
  double end = 0.0;
  DetectorBag detector_bag;

  std::string id() const { return scenario + "#" + std::to_string(index); }
  std::vector<DetectorId> detector_sequence() const;
};

/// Splits time-ordered alerts wherever the gap to the previous alert exceeds
/// `interval_seconds`. Throws std::invalid_argument on unsorted input.
std::vector<AlertGroup> group_by_gap(std::span<const Alert> alerts, double interval_seconds);

/// Groups each scenario separately (alerts stably sorted by timestamp first).
std::vector<AlertGroup> group_scenarios(std::span<const Alert> alerts, double interval_seconds);

struct SimilarityWeights {
  double detectors = 0.4;
  double frequency = 0.4;
  double sequence = 0.2;
};

/// The parts of a group that similarity looks at.
struct GroupProfile {
  DetectorBag bag;
  std::vector<DetectorId> sequence;
};

GroupProfile profile_of(const AlertGroup& group);

struct SimilarityParts {
  double detectors = 0.0;  // Jaccard over bag keys
  double frequency = 0.0;  // mean min/max count ratio over shared detectors
  double sequence = 0.0;   // LCS / longer length
};

/// Sequences longer than this are run-collapsed (then truncated) before the
/// LCS is taken, which keeps very dense scan groups tractable.
inline constexpr std::size_t kMaxExactSequence = 20000;

SimilarityParts similarity_parts(const GroupProfile& a, const GroupProfile& b,
                                 std::size_t max_exact_sequence = kMaxExactSequence);
double group_similarity(const GroupProfile& a, const GroupProfile& b,
                        const SimilarityWeights& weights = {});
double group_similarity(const AlertGroup& a, const AlertGroup& b,
                        const SimilarityWeights& weights = {});

/// Length of the longest common subsequence (bit-parallel).
std::size_t lcs_length(std::span<const int> a, std::span<const int> b);

/// 0 across detectors; otherwise the fraction of shared attribute keys with
/// equal values (1 when no key is shared).
double alert_similarity(const Alert& a, const Alert& b);

/// Attribute value or wildcard (nullopt).
using TemplateValue = std::optional<std::string>;

struct AlertTemplate {
  DetectorId detector;
  std::map<std::string, TemplateValue> attributes;
  std::size_t min_count = 0;
  std::size_t max_count = 0;

  friend bool operator==(const AlertTemplate&, const AlertTemplate&) = default;
};

/// alert_similarity generalized to templates; a wildcard matches any value.
double template_similarity(const AlertTemplate& a, const AlertTemplate& b);

/// Reference to a group that contributed to a meta-alert.
struct GroupRef {
  std::string group;
  std::string scenario;
  double start = 0.0;
  double end = 0.0;
  std::size_t alerts = 0;
  DetectorBag detectors;

  friend bool operator==(const GroupRef&, const GroupRef&) = default;
};

struct MetaAlert {
  std::string id;
  std::vector<AlertTemplate> templates;
  std::vector<GroupRef> members;

  /// The templates as a group: each template repeated max_count times.
  GroupProfile representative() const;
  friend bool operator==(const MetaAlert&, const MetaAlert&) = default;
};

struct MergeOptions {
  double group_threshold = kDefaultGroupThreshold;
  double alert_threshold = kDefaultAlertThreshold;
  SimilarityWeights weights;
};

/// Collapses a group's alerts into templates with counts (min == max).
std::vector<AlertTemplate> templates_of(const AlertGroup& group, double alert_threshold);

/// Incremental merge of groups (processed by start time, then scenario, then
/// index) into meta-alerts m0, m1, ... A final pass folds meta-alerts whose
/// representatives still reach the group threshold, so no two outputs do.
/// Throws std::invalid_argument for thresholds outside [0, 1].
std::vector<MetaAlert> merge_into_meta_alerts(std::span<const AlertGroup> groups,
                                              const MergeOptions& options = {});

std::size_t distinct_alert_count(std::span<const MetaAlert> metas);

/// Synthetic group whose alerts spell out the meta-alert's templates
/// (wildcards become "*"), used to re-merge meta-alerts.
AlertGroup representative_group(const MetaAlert& meta, std::size_t index);

nlohmann::json to_json(const MetaAlert& meta);
MetaAlert meta_alert_from_json(const nlohmann::json& j);
void write_meta_alerts(const std::string& path, std::span<const MetaAlert> metas);
std::vector<MetaAlert> read_meta_alerts(const std::string& path);

/// Text summary: each meta-alert with its member scenarios and truncated
/// alert lists with frequencies.
std::string render_meta_summary(std::span<const MetaAlert> metas, std::size_t max_items = 4);

}  // namespace alertkit
