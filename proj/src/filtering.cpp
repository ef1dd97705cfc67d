#include "alertkit/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace alertkit {

std::vector<DetectorId> retained_detectors(std::span<const ScoreRow> rows, double threshold) {
  std::vector<DetectorId> out;
  for (const auto& r : rows)
    if (!r.detector.is_unknown() && r.detection_score > threshold) out.push_back(r.detector);
  std::sort(out.begin(), out.end());
  return out;
}

AlertFilter::AlertFilter(std::span<const ScoreRow> rows, double threshold,
                         std::span<const ScenarioLabels> labels)
    : threshold_(threshold) {
  for (const auto& r : rows) scores_[r.detector] = r.detection_score;
  for (const auto& l : labels) labels_.emplace(l.name, &l);
}

bool AlertFilter::prioritized(const Alert& a) const {
  if (a.detector.is_unknown()) return false;
  auto it = scores_.find(a.detector);
  return it != scores_.end() && it->second > threshold_;
}

bool AlertFilter::in_attack_phase(const Alert& a) const {
  auto it = labels_.find(a.scenario);
  return it != labels_.end() && assign_phase(a, *it->second).has_value();
}

std::vector<Alert> filter_by_detection_score(std::span<const Alert> alerts,
                                             std::span<const ScoreRow> rows, double threshold) {
  AlertFilter f(rows, threshold, {});
  std::vector<Alert> out;
  std::copy_if(alerts.begin(), alerts.end(), std::back_inserter(out),
               [&](const Alert& a) { return f.prioritized(a); });
  return out;
}

std::vector<Alert> filter_to_attack_phases(std::span<const Alert> alerts,
                                           std::span<const ScenarioLabels> labels) {
  AlertFilter f({}, 0.0, labels);
  std::vector<Alert> out;
  std::copy_if(alerts.begin(), alerts.end(), std::back_inserter(out),
               [&](const Alert& a) { return f.in_attack_phase(a); });
  return out;
}

double reduction_rate(std::size_t before, std::size_t after) {
  if (before == 0) throw std::invalid_argument("reduction_rate: empty baseline");
  if (after > before) throw std::invalid_argument("reduction_rate: after exceeds before");
  return (1.0 - static_cast<double>(after) / static_cast<double>(before)) * 100.0;
}

std::string render_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::round(percent * 100.0) / 100.0);
  return buf;
}

std::string_view stage_label(FilterStage stage) {
  switch (stage) {
    case FilterStage::kAll: return "All";
    case FilterStage::kPrioritized: return "Filtered by prioritization";
    case FilterStage::kInAttackPhases: return "In attack phases";
    case FilterStage::kPrioritizedInAttackPhases: return "Filtered and in attack phases";
  }
  return "";
}

std::optional<double> ScenarioFilterCounts::reduction(FilterStage stage) const {
  auto all = counts[0];
  if (all == 0) return std::nullopt;
  return reduction_rate(all, counts[static_cast<std::size_t>(stage)]);
}

FilterReportBuilder::FilterReportBuilder(const AlertFilter& filter,
                                         std::span<const ScenarioLabels> labels)
    : filter_(&filter) {
  for (const auto& l : labels) {
    index_.emplace(l.name, counts_.size());
    counts_.push_back({l.name, {}});
  }
}

bool FilterReportBuilder::add(const Alert& a) {
  bool prio = filter_->prioritized(a);
  bool phase = filter_->in_attack_phase(a);
  if (auto it = index_.find(a.scenario); it != index_.end()) {
    auto& c = counts_[it->second].counts;
    ++c[0];
    if (prio) ++c[1];
    if (phase) ++c[2];
    if (prio && phase) ++c[3];
  }
  return prio && phase;
}

FilterReport FilterReportBuilder::finish() const {
  FilterReport report;
  report.scenarios = counts_;
  for (auto stage : kAllStages) {
    if (stage == FilterStage::kAll) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : counts_) {
      if (auto r = s.reduction(stage)) {
        sum += *r;
        ++n;
      }
    }
    report.average_reduction[static_cast<std::size_t>(stage)] = n == 0 ? 0.0 : sum / n;
  }
  return report;
}

FilterReport build_filter_report(std::span<const Alert> alerts, std::span<const ScoreRow> rows,
                                 std::span<const ScenarioLabels> labels, double threshold) {
  AlertFilter f(rows, threshold, labels);
  FilterReportBuilder b(f, labels);
  for (const auto& a : alerts) b.add(a);
  return b.finish();
}

std::string filter_report_csv(const FilterReport& report) {
  std::ostringstream out;
  out << "scenario,stage,alerts,reduction_percent\n";
  for (const auto& s : report.scenarios) {
    for (auto stage : kAllStages) {
      auto i = static_cast<std::size_t>(stage);
      out << s.scenario << ',' << stage_label(stage) << ',' << s.counts[i] << ',';
      if (stage != FilterStage::kAll) {
        if (auto r = s.reduction(stage)) out << render_percent(*r);
      }
      out << '\n';
    }
  }
  for (auto stage : kAllStages) {
    if (stage == FilterStage::kAll) continue;
    out << "average," << stage_label(stage) << ",,"
        << render_percent(report.average_reduction[static_cast<std::size_t>(stage)]) << '\n';
  }
  return out.str();
}

namespace {

std::string with_thousands(std::size_t n) {
  auto digits = std::to_string(n);
  std::string out;
  int k = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it, ++k) {
    if (k > 0 && k % 3 == 0) out += ',';
    out += *it;
  }
  return {out.rbegin(), out.rend()};
}

}  // namespace

std::string filter_report_table(const FilterReport& report) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head{"Alerts"};
  for (const auto& s : report.scenarios) head.push_back(s.scenario);
  head.push_back("Avg. reduction rate");
  cells.push_back(head);
  for (auto stage : kAllStages) {
    auto i = static_cast<std::size_t>(stage);
    std::vector<std::string> row{std::string(stage_label(stage))};
    for (const auto& s : report.scenarios) {
      auto text = with_thousands(s.counts[i]);
      if (stage != FilterStage::kAll) {
        if (auto r = s.reduction(stage)) text += " (" + render_percent(*r) + "%)";
      }
      row.push_back(text);
    }
    row.push_back(stage == FilterStage::kAll ? "-" : render_percent(report.average_reduction[i]) + "%");
    cells.push_back(row);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace alertkit
