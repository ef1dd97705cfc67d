#include "alertkit/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace alertkit {

std::size_t count_in_interval(std::span<const Alert> alerts, const DetectorId& detector,
                              const TimeWindow& interval) {
  return static_cast<std::size_t>(std::count_if(alerts.begin(), alerts.end(), [&](const Alert& a) {
    return a.detector == detector && interval.contains(a.timestamp);
  }));
}

double alert_rate(std::size_t count, double duration_seconds) {
  if (!(duration_seconds > 0.0)) throw std::invalid_argument("alert_rate: duration must be positive");
  return static_cast<double>(count) * 60.0 / duration_seconds;
}

std::string render_rate(double per_minute) {
  if (per_minute <= 0.0) return "";
  if (per_minute < 0.01) return ">0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", per_minute);
  return buf;
}

std::string render_score(double score) {
  double cut = std::floor(score * 100.0 + 1e-9) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", cut);
  std::string s = buf;
  if (s.back() == '0') s.pop_back();
  return s;
}

double robustness_term(const PhaseObservation& obs) {
  if (!(obs.attack_seconds > 0.0) || !(obs.test_seconds > 0.0))
    throw std::invalid_argument("robustness: interval durations must be positive");
  if (obs.n_attack == 0) throw std::invalid_argument("robustness: term needs n_attack > 0");
  double ratio = static_cast<double>(obs.n_test) / static_cast<double>(obs.n_attack) *
                 (obs.attack_seconds / obs.test_seconds);
  return 1.0 - std::min(1.0, ratio);
}

double robustness_score(std::span<const PhaseObservation> observations) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& obs : observations) {
    if (!(obs.attack_seconds > 0.0) || !(obs.test_seconds > 0.0))
      throw std::invalid_argument("robustness: interval durations must be positive");
    if (obs.n_attack == 0) continue;
    sum += robustness_term(obs);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

DetectionScore detection_score(const PhaseValues& robustness, const PhaseCounts& detected,
                               const PhaseCounts& occurs) {
  DetectionScore best;
  for (auto p : kAllPhases) {
    auto i = index_of(p);
    if (occurs[i] == 0) continue;
    double v = robustness[i] * static_cast<double>(detected[i]) / static_cast<double>(occurs[i]);
    if (v > best.value) best = {v, p};
  }
  return best;
}

const PhaseCounts& DetectionMatrix::row(const DetectorId& d) const {
  static const PhaseCounts kEmpty{};
  auto it = detected.find(d);
  return it == detected.end() ? kEmpty : it->second;
}

std::size_t DetectionMatrix::fp(const DetectorId& d) const {
  auto it = false_positives.find(d);
  return it == false_positives.end() ? 0 : it->second;
}

double ScoreRow::reported_robustness() const {
  if (best_phase) return robustness[index_of(*best_phase)];
  return *std::max_element(robustness.begin(), robustness.end());
}

std::vector<ScoreRow> rank_detectors(std::vector<ScoreRow> rows) {
  std::erase_if(rows, [](const ScoreRow& r) { return !(r.detection_score > 0.0); });
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.detection_score != b.detection_score) return a.detection_score > b.detection_score;
    double ra = a.reported_robustness(), rb = b.reported_robustness();
    if (ra != rb) return ra > rb;
    return a.detector < b.detector;
  });
  return rows;
}

ScoreAccumulator::ScoreAccumulator(std::vector<ScenarioLabels> labels)
    : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i].name, i);
}

void ScoreAccumulator::add(const Alert& alert) {
  auto it = index_.find(alert.scenario);
  if (it == index_.end()) {
    ++unlabeled_;
    return;
  }
  const auto s = it->second;
  auto& per_scenario = cells_[alert.detector];
  if (per_scenario.empty()) per_scenario.resize(labels_.size());
  auto& cell = per_scenario[s];
  const auto& lab = labels_[s];
  for (auto p : kAllPhases)
    if (lab.in_phase(p, alert.timestamp)) ++cell.phase[index_of(p)];
  if (lab.test.contains(alert.timestamp)) ++cell.test;
}

ScoreReport ScoreAccumulator::finalize() const {
  ScoreReport report;
  auto& m = report.matrix;
  for (const auto& lab : labels_)
    for (auto p : kAllPhases)
      if (lab.has_phase(p)) ++m.occurs[index_of(p)];

  for (const auto& [detector, per_scenario] : cells_) {
    ScoreRow row;
    row.detector = detector;
    for (std::size_t s = 0; s < labels_.size(); ++s) {
      const auto& lab = labels_[s];
      const auto& cell = per_scenario[s];
      for (auto p : kAllPhases)
        if (lab.has_phase(p) && cell.phase[index_of(p)] > 0) ++row.detected[index_of(p)];
      if (cell.test > 0) ++row.false_positives;
    }
    for (auto p : kAllPhases) {
      std::vector<PhaseObservation> obs;
      std::size_t attack_total = 0;
      double attack_seconds = 0.0;
      for (std::size_t s = 0; s < labels_.size(); ++s) {
        const auto& lab = labels_[s];
        if (!lab.has_phase(p)) continue;
        const auto& cell = per_scenario[s];
        obs.push_back({cell.phase[index_of(p)], cell.test, lab.phase_duration(p),
                       lab.test.duration()});
        attack_total += cell.phase[index_of(p)];
        attack_seconds += lab.phase_duration(p);
      }
      row.robustness[index_of(p)] = robustness_score(obs);
      if (attack_seconds > 0.0)
        report.rates[{detector, std::string(to_string(p))}] =
            alert_rate(attack_total, attack_seconds);
    }
    std::size_t test_total = 0;
    double test_seconds = 0.0;
    for (std::size_t s = 0; s < labels_.size(); ++s) {
      test_total += per_scenario[s].test;
      test_seconds += labels_[s].test.duration();
    }
    if (test_seconds > 0.0) report.rates[{detector, "normal"}] = alert_rate(test_total, test_seconds);

    auto det = detection_score(row.robustness, row.detected, m.occurs);
    row.detection_score = det.value;
    row.best_phase = det.best_phase;
    m.detected[detector] = row.detected;
    m.false_positives[detector] = row.false_positives;
    report.rows.push_back(std::move(row));
  }
  return report;
}

ScoreReport score_alerts(std::span<const Alert> alerts, std::span<const ScenarioLabels> labels) {
  ScoreAccumulator acc({labels.begin(), labels.end()});
  for (const auto& a : alerts) acc.add(a);
  return acc.finalize();
}

DetectionMatrix detection_matrix(std::span<const Alert> alerts,
                                 std::span<const ScenarioLabels> labels) {
  return score_alerts(alerts, labels).matrix;
}

std::string scores_csv(std::span<const ScoreRow> ranked) {
  std::ostringstream out;
  out << "detector";
  for (auto p : kAllPhases) out << ',' << to_string(p);
  out << ",false_positives,robustness,detection_score\n";
  for (const auto& r : ranked) {
    out << r.detector.str();
    for (auto c : r.detected) out << ',' << c;
    out << ',' << r.false_positives << ',' << render_score(r.reported_robustness()) << ','
        << render_score(r.detection_score) << '\n';
  }
  return out.str();
}

std::string rates_csv(const RateTable& rates) {
  std::ostringstream out;
  out << "detector,interval,alerts_per_minute,display\n";
  for (const auto& [key, rate] : rates) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", rate);
    out << key.first.str() << ',' << key.second << ',' << buf << ',' << render_rate(rate) << '\n';
  }
  return out.str();
}

nlohmann::json scores_to_json(std::span<const ScoreRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json rob = nlohmann::json::object(), det = nlohmann::json::object();
    for (auto p : kAllPhases) {
      rob[std::string(to_string(p))] = r.robustness[index_of(p)];
      det[std::string(to_string(p))] = r.detected[index_of(p)];
    }
    arr.push_back({{"detector", r.detector.str()},
                   {"robustness", rob},
                   {"detected", det},
                   {"false_positives", r.false_positives},
                   {"detection_score", r.detection_score},
                   {"best_phase", r.best_phase ? nlohmann::json(std::string(to_string(*r.best_phase)))
                                               : nlohmann::json(nullptr)}});
  }
  return {{"format", "alertkit-scores"}, {"version", 1}, {"rows", arr}};
}

std::vector<ScoreRow> scores_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "alertkit-scores")
    throw ConfigError("not an alertkit score store");
  std::vector<ScoreRow> rows;
  for (const auto& e : j.at("rows")) {
    ScoreRow r;
    r.detector = DetectorId::parse(e.at("detector").get<std::string>());
    for (auto p : kAllPhases) {
      auto key = std::string(to_string(p));
      r.robustness[index_of(p)] = e.at("robustness").value(key, 0.0);
      r.detected[index_of(p)] = e.at("detected").value(key, std::size_t{0});
    }
    r.false_positives = e.value("false_positives", std::size_t{0});
    r.detection_score = e.at("detection_score").get<double>();
    if (e.contains("best_phase") && e["best_phase"].is_string())
      r.best_phase = parse_phase(e["best_phase"].get<std::string>());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace alertkit
