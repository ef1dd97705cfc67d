#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "alertkit/model.hpp"
#include "alertkit/scoring.hpp"

namespace alertkit {

inline constexpr double kDefaultScoreThreshold = 0.7;

/// Detectors whose detection score is strictly above `threshold`.
std::vector<DetectorId> retained_detectors(std::span<const ScoreRow> rows, double threshold);

/// Keeps alerts whose detector scores strictly above `threshold`. Unknown
/// detectors and detectors missing from `rows` are dropped.
std::vector<Alert> filter_by_detection_score(std::span<const Alert> alerts,
                                             std::span<const ScoreRow> rows, double threshold);

/// Keeps alerts that fall inside some attack phase of their scenario.
std::vector<Alert> filter_to_attack_phases(std::span<const Alert> alerts,
                                           std::span<const ScenarioLabels> labels);

/// (1 - after/before) * 100. Throws std::invalid_argument if before == 0 or
/// after > before.
double reduction_rate(std::size_t before, std::size_t after);

/// Percentage text rounded half-up to two decimals ("11.10").
std::string render_percent(double percent);

enum class FilterStage { kAll, kPrioritized, kInAttackPhases, kPrioritizedInAttackPhases };
inline constexpr std::array<FilterStage, 4> kAllStages = {
    FilterStage::kAll, FilterStage::kPrioritized, FilterStage::kInAttackPhases,
    FilterStage::kPrioritizedInAttackPhases};
std::string_view stage_label(FilterStage stage);

struct ScenarioFilterCounts {
  std::string scenario;
  std::array<std::size_t, 4> counts{};  // indexed by FilterStage

  /// Reduction of `stage` relative to kAll; nullopt when the scenario is empty.
  std::optional<double> reduction(FilterStage stage) const;
};

struct FilterReport {
  std::vector<ScenarioFilterCounts> scenarios;  // label order
  /// Unweighted mean over scenarios with alerts, per stage (kAll is 0).
  std::array<double, 4> average_reduction{};
};

/// Predicate form of the two filters, shared by the report and the CLI.
class AlertFilter {
 public:
  AlertFilter(std::span<const ScoreRow> rows, double threshold,
              std::span<const ScenarioLabels> labels);
  bool prioritized(const Alert& a) const;
  bool in_attack_phase(const Alert& a) const;

 private:
  std::map<DetectorId, double> scores_;
  double threshold_;
  std::map<std::string, const ScenarioLabels*, std::less<>> labels_;
};

FilterReport build_filter_report(std::span<const Alert> alerts, std::span<const ScoreRow> rows,
                                 std::span<const ScenarioLabels> labels, double threshold);

/// Streaming form: add alerts one at a time.
class FilterReportBuilder {
 public:
  FilterReportBuilder(const AlertFilter& filter, std::span<const ScenarioLabels> labels);
  /// Returns true when the alert survives both filters.
  bool add(const Alert& alert);
  FilterReport finish() const;

 private:
  const AlertFilter* filter_;
  std::vector<ScenarioFilterCounts> counts_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

std::string filter_report_csv(const FilterReport& report);
/// Aligned text table: one row per stage, one column per scenario.
std::string filter_report_table(const FilterReport& report);

}  // namespace alertkit
