#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace alertkit {

/// Raised for malformed configuration files or invalid domain values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The three IDS products whose alerts are consumed.
enum class SourceIds { kWazuh, kSuricata, kAminer };

inline constexpr std::array<SourceIds, 3> kAllSources = {
    SourceIds::kWazuh, SourceIds::kSuricata, SourceIds::kAminer};

std::string_view to_string(SourceIds ids);
std::optional<SourceIds> parse_source_ids(std::string_view text);

/// Detector abbreviation such as "W-Acc-Att" (IDS, source token, event token)
/// or the sentinel "unknown".
class DetectorId {
 public:
  DetectorId() = default;  // unknown

  /// Throws ConfigError if `rendered` is not of the form "X-Yyy-Zzz" or
  /// "unknown", or if its first token disagrees with a known IDS letter.
  static DetectorId parse(std::string_view rendered);
  static DetectorId unknown() { return {}; }

  bool is_unknown() const { return rendered_.empty(); }
  std::optional<SourceIds> ids() const;
  std::string_view source() const;
  std::string_view event() const;
  std::string str() const { return is_unknown() ? "unknown" : rendered_; }

  friend bool operator==(const DetectorId&, const DetectorId&) = default;
  friend auto operator<=>(const DetectorId& a, const DetectorId& b) {
    return a.str() <=> b.str();
  }

 private:
  std::string rendered_;
};

/// One normalized alert. `raw` is the source record byte for byte.
struct Alert {
  std::string id;
  std::string scenario;
  double timestamp = 0.0;  // UTC seconds since epoch
  SourceIds ids = SourceIds::kWazuh;
  DetectorId detector;
  std::string signature;
  std::string host;
  std::optional<std::string> src_ip;
  std::optional<std::string> dst_ip;
  std::optional<int> src_port;
  std::optional<int> dst_port;
  std::map<std::string, std::string> attributes;
  std::string raw;

  friend bool operator==(const Alert&, const Alert&) = default;
};

/// Attack phases in display order (score table column order).
enum class PhaseName {
  kNetworkScans,
  kServiceScans,
  kWordpressScan,
  kDirbScan,
  kWebshellUpload,
  kPasswordCracking,
  kReverseShell,
  kPrivilegeEscalation,
  kServiceStop,
  kDataExfiltration,
};

inline constexpr std::size_t kPhaseCount = 10;
inline constexpr std::array<PhaseName, kPhaseCount> kAllPhases = {
    PhaseName::kNetworkScans,     PhaseName::kServiceScans,
    PhaseName::kWordpressScan,    PhaseName::kDirbScan,
    PhaseName::kWebshellUpload,   PhaseName::kPasswordCracking,
    PhaseName::kReverseShell,     PhaseName::kPrivilegeEscalation,
    PhaseName::kServiceStop,      PhaseName::kDataExfiltration,
};

std::string_view to_string(PhaseName phase);
std::optional<PhaseName> parse_phase(std::string_view text);

/// True for A1..A8, the sequential steps of the multi-step attack.
constexpr bool is_multi_step(PhaseName phase) {
  return static_cast<int>(phase) <= static_cast<int>(PhaseName::kPrivilegeEscalation);
}

constexpr std::size_t index_of(PhaseName phase) {
  return static_cast<std::size_t>(phase);
}

/// Half-open time interval [start, end).
struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool contains(double t) const { return t >= start && t < end; }
  bool overlaps(const TimeWindow& o) const {
    return start < o.end && o.start < end;
  }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct AttackPhaseWindow {
  PhaseName phase;
  TimeWindow window;
  friend bool operator==(const AttackPhaseWindow&, const AttackPhaseWindow&) = default;
};

using TestWindow = TimeWindow;

inline constexpr double kDefaultTestWindowSeconds = 18000.0;
inline constexpr double kTestWindowLeadSeconds = 86400.0;

struct ScenarioLabels {
  std::string name;
  std::vector<AttackPhaseWindow> phases;
  std::optional<TestWindow> test_override;
  TestWindow test;  // resolved: override or derived default
  double data_start = 0.0;
  double data_end = 0.0;

  bool has_phase(PhaseName phase) const;
  /// Summed length of all windows labeled `phase`.
  double phase_duration(PhaseName phase) const;
  bool in_phase(PhaseName phase, double t) const;
};

/// Phase whose window contains the timestamp; on overlap the window with the
/// latest start wins (then the later phase in display order).
std::optional<PhaseName> assign_phase(const Alert& alert, const ScenarioLabels& labels);
std::optional<PhaseName> assign_phase(double timestamp,
                                      const std::vector<AttackPhaseWindow>& windows);

bool in_test_window(const Alert& alert, const ScenarioLabels& labels);

/// Returns the override when present; otherwise a window of `duration`
/// seconds starting one day before the earliest multi-step phase. Throws
/// ConfigError if there is no multi-step phase, or if the derived window
/// overlaps a phase or precedes data_start.
TestWindow derive_default_test_window(const ScenarioLabels& labels,
                                      double duration = kDefaultTestWindowSeconds);

/// Checks window ordering, containment, multi-step disjointness and
/// test/phase non-overlap. Throws ConfigError.
void validate(const ScenarioLabels& labels);

/// Parses ISO-8601 ("2022-01-21T00:00:01.553690+0000", "...Z", "+01:00") or a
/// bare decimal epoch into UTC seconds. Returns nullopt on malformed input.
std::optional<double> parse_timestamp(std::string_view text);
std::string format_timestamp(double seconds);

/// Loads {"scenarios": [...]} label configuration. Missing "test" entries are
/// derived with `test_duration`.
std::vector<ScenarioLabels> load_labels(const std::string& path,
                                        double test_duration = kDefaultTestWindowSeconds);
std::vector<ScenarioLabels> parse_labels(std::string_view json_text,
                                         double test_duration = kDefaultTestWindowSeconds);

const ScenarioLabels* find_scenario(const std::vector<ScenarioLabels>& all,
                                    std::string_view name);

}  // namespace alertkit
