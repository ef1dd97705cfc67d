#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alertkit/model.hpp"

namespace alertkit {

using PhaseCounts = std::array<std::size_t, kPhaseCount>;
using PhaseValues = std::array<double, kPhaseCount>;

std::size_t count_in_interval(std::span<const Alert> alerts, const DetectorId& detector,
                              const TimeWindow& interval);

/// Alerts per minute. Throws std::invalid_argument for duration <= 0.
double alert_rate(std::size_t count, double duration_seconds);

/// Rate cell text: "" for zero, ">0" below 0.01, otherwise two decimals.
std::string render_rate(double per_minute);

/// Score text: truncated toward zero at two decimals, trailing zeros trimmed
/// but at least one decimal kept ("1.0", "0.8", "0.71").
std::string render_score(double score);

/// One scenario's contribution to the robustness of a (phase, detector) pair.
struct PhaseObservation {
  std::size_t n_attack = 0;
  std::size_t n_test = 0;
  double attack_seconds = 0.0;
  double test_seconds = 0.0;
};

/// 1 - min(1, (n_test / n_attack) * (attack / test)); requires n_attack > 0.
double robustness_term(const PhaseObservation& obs);

/// Mean of robustness_term over the observations with n_attack > 0, or 0 if
/// there are none. `observations` holds one entry per scenario containing the
/// phase. Throws std::invalid_argument on non-positive durations.
double robustness_score(std::span<const PhaseObservation> observations);

struct DetectionScore {
  double value = 0.0;
  std::optional<PhaseName> best_phase;  // first phase (display order) reaching the max
};

/// max over phases of robustness[p] * detected[p] / occurs[p], skipping
/// phases that occur in no scenario. Empty max is 0.
DetectionScore detection_score(const PhaseValues& robustness, const PhaseCounts& detected,
                               const PhaseCounts& occurs);

struct DetectionMatrix {
  /// detector -> per phase: scenarios with >= 1 alert in that phase window
  std::map<DetectorId, PhaseCounts> detected;
  /// detector -> scenarios with >= 1 alert in the test window
  std::map<DetectorId, std::size_t> false_positives;
  /// per phase: scenarios whose labels contain the phase
  PhaseCounts occurs{};

  const PhaseCounts& row(const DetectorId& d) const;
  std::size_t fp(const DetectorId& d) const;
};

DetectionMatrix detection_matrix(std::span<const Alert> alerts,
                                 std::span<const ScenarioLabels> labels);

struct ScoreRow {
  DetectorId detector;
  PhaseValues robustness{};
  PhaseCounts detected{};
  std::size_t false_positives = 0;
  double detection_score = 0.0;
  std::optional<PhaseName> best_phase;

  /// Robustness of the phase reaching the detection-score maximum.
  double reported_robustness() const;
};

/// Descending detection score, zero scores dropped, ties by descending
/// reported robustness then detector id.
std::vector<ScoreRow> rank_detectors(std::vector<ScoreRow> rows);

/// Interval label is a phase name or "normal".
using RateTable = std::map<std::pair<DetectorId, std::string>, double>;

struct ScoreReport {
  DetectionMatrix matrix;
  std::vector<ScoreRow> rows;  // every detector seen, sorted by id
  RateTable rates;
};

/// Single-pass accumulator: feed alerts in any order, then finalize.
class ScoreAccumulator {
 public:
  explicit ScoreAccumulator(std::vector<ScenarioLabels> labels);

  /// Alerts of scenarios without labels are ignored and counted.
  void add(const Alert& alert);
  std::size_t unlabeled() const { return unlabeled_; }

  ScoreReport finalize() const;

 private:
  struct Cell {
    PhaseCounts phase{};
    std::size_t test = 0;
  };
  std::vector<ScenarioLabels> labels_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<DetectorId, std::vector<Cell>> cells_;  // detector -> per scenario
  std::size_t unlabeled_ = 0;
};

ScoreReport score_alerts(std::span<const Alert> alerts, std::span<const ScenarioLabels> labels);

// Persistence: ranked score CSV (rounded), rate CSV, and a full-precision JSON
// store consumed by filtering.
std::string scores_csv(std::span<const ScoreRow> ranked);
std::string rates_csv(const RateTable& rates);
nlohmann::json scores_to_json(std::span<const ScoreRow> rows);
std::vector<ScoreRow> scores_from_json(const nlohmann::json& j);

}  // namespace alertkit
