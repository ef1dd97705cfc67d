#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "alertkit/model.hpp"
#include "alertkit/taxonomy.hpp"

namespace alertkit {

inline constexpr double kDefaultDedupeWindow = 2.0;
inline constexpr double kDefaultEpisodeGap = 7200.0;

/// Detector -> attack stage, plus detectors that carry no attack meaning.
class StageMapping {
 public:
  StageMapping() = default;
  StageMapping(std::map<DetectorId, std::string> stages, std::set<DetectorId> dropped);

  static const StageMapping& builtin();
  static StageMapping parse(std::string_view json_text);
  static StageMapping load(const std::string& path);

  /// Stage of a detector; nullopt when dropped, unmapped or unknown.
  std::optional<std::string> stage(const DetectorId& id) const;
  bool dropped(const DetectorId& id) const { return dropped_.contains(id); }
  const std::map<DetectorId, std::string>& stages() const { return stages_; }

  /// Throws ConfigError naming taxonomy ids that are neither mapped nor dropped.
  void check_total(const SignatureTable& table) const;

 private:
  std::map<DetectorId, std::string> stages_;
  std::set<DetectorId> dropped_;
};

/// scenario -> (address -> canonical address)
using IpMap = std::map<std::string, std::map<std::string, std::string>>;

IpMap parse_ip_map(std::string_view json_text);
IpMap load_ip_map(const std::string& path);
IpMap invert(const IpMap& map);

/// Rewrites src/dst addresses, the host and attribute values equal to a mapped
/// address. `unmapped` receives each distinct unmapped address once.
std::vector<Alert> remap_victims(std::span<const Alert> alerts, const IpMap& map,
                                 const std::function<void(const std::string&)>& unmapped = {});

/// Victim of an alert: the reporting host.
inline const std::string& victim_of(const Alert& a) { return a.host; }
/// Attacker of an alert: its scenario (one attacker per scenario).
inline const std::string& attacker_of(const Alert& a) { return a.scenario; }

/// Keeps an alert only if >= window_seconds passed since the last kept alert
/// with the same (detector, victim, attacker). Throws std::invalid_argument
/// on unsorted input.
std::vector<Alert> dedupe_window(std::span<const Alert> alerts, double window_seconds);

struct Episode {
  std::string attacker;
  std::string victim;
  std::string stage;
  double start = 0.0;
  double end = 0.0;
  std::set<int> services;
  std::size_t alert_count = 0;

  friend bool operator==(const Episode&, const Episode&) = default;
};

/// Runs of same-stage alerts per (attacker, victim) with gaps <= gap_seconds.
/// Alerts without a stage are skipped. Input must be sorted by timestamp.
/// Output is ordered by (attacker, victim, start).
std::vector<Episode> build_episodes(std::span<const Alert> alerts, const StageMapping& mapping,
                                    double gap_seconds);

struct GraphNode {
  std::string stage;
  std::set<int> services;

  std::string key() const;
  std::string label() const;
  friend auto operator<=>(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  GraphNode from;
  GraphNode to;
  std::string attacker;
  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

struct AttackGraph {
  std::string victim;
  std::set<GraphNode> nodes;
  std::set<GraphEdge> edges;
  /// attacker -> last node of its chain
  std::map<std::string, GraphNode> terminal;
  /// attacker -> first node of its chain
  std::map<std::string, GraphNode> initial;
};

struct GraphOptions {
  /// Nodes reached by fewer attackers are pruned (0 and 1 keep everything).
  std::size_t min_node_support = 0;
};

/// Nodes keyed by (stage, service set); each attacker's episodes, in time
/// order, are chained by edges. Consecutive episodes on the same node do not
/// create self-loops. Episodes of other victims are ignored.
AttackGraph build_graph(std::span<const Episode> episodes, const std::string& victim,
                        const GraphOptions& options = {});

std::vector<std::string> victims_of(std::span<const Episode> episodes);

/// Deterministic DOT digraph; edge colors come from a fixed per-scenario palette.
std::string export_dot(const AttackGraph& graph);
std::string attacker_color(const std::string& attacker);

}  // namespace alertkit
