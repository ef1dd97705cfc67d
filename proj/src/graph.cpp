#include "alertkit/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "alertkit/resources.hpp"

namespace alertkit {

using nlohmann::json;

StageMapping::StageMapping(std::map<DetectorId, std::string> stages, std::set<DetectorId> dropped)
    : stages_(std::move(stages)), dropped_(std::move(dropped)) {
  for (const auto& [id, stage] : stages_) {
    if (dropped_.contains(id))
      throw ConfigError("detector " + id.str() + " is both mapped and dropped");
    if (stage.empty()) throw ConfigError("detector " + id.str() + " mapped to an empty stage");
  }
}

const StageMapping& StageMapping::builtin() {
  static const StageMapping mapping = parse(resources::stage_mapping_json());
  return mapping;
}

StageMapping StageMapping::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("stage mapping is not valid JSON: ") + e.what());
  }
  std::map<DetectorId, std::string> stages;
  std::set<DetectorId> dropped;
  try {
    const json stage_obj = doc.value("stages", json::object());
    for (const auto& [id, stage] : stage_obj.items())
      stages.emplace(DetectorId::parse(id), stage.get<std::string>());
    for (const auto& id : doc.value("drop", json::array()))
      dropped.insert(DetectorId::parse(id.get<std::string>()));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("stage mapping has a malformed entry: ") + e.what());
  }
  return StageMapping(std::move(stages), std::move(dropped));
}

StageMapping StageMapping::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stage mapping " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> StageMapping::stage(const DetectorId& id) const {
  auto it = stages_.find(id);
  if (it == stages_.end()) return std::nullopt;
  return it->second;
}

void StageMapping::check_total(const SignatureTable& table) const {
  std::string missing;
  for (const auto& id : table.detectors()) {
    if (stages_.contains(id) || dropped_.contains(id)) continue;
    if (!missing.empty()) missing += ", ";
    missing += id.str();
  }
  if (!missing.empty())
    throw ConfigError("stage mapping neither maps nor drops: " + missing);
}

IpMap parse_ip_map(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ip map is not valid JSON: ") + e.what());
  }
  IpMap out;
  const json scenarios = doc.value("scenarios", json::object());
  for (const auto& [scenario, entries] : scenarios.items()) {
    if (!entries.is_object()) throw ConfigError("ip map entry for " + scenario + " must be an object");
    for (const auto& [from, to] : entries.items()) {
      if (!to.is_string()) throw ConfigError("ip map value for " + from + " must be a string");
      out[scenario][from] = to.get<std::string>();
    }
  }
  return out;
}

IpMap load_ip_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ip map " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ip_map(buf.str());
}

IpMap invert(const IpMap& map) {
  IpMap out;
  for (const auto& [scenario, entries] : map)
    for (const auto& [from, to] : entries) out[scenario][to] = from;
  return out;
}

namespace {

bool looks_like_address(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
           return std::isxdigit(c) || c == '.' || c == ':';
         }) &&
         std::count_if(s.begin(), s.end(), [](char c) { return c == '.' || c == ':'; }) >= 2;
}

}  // namespace

std::vector<Alert> remap_victims(std::span<const Alert> alerts, const IpMap& map,
                                 const std::function<void(const std::string&)>& unmapped) {
  std::set<std::pair<std::string, std::string>> reported;
  std::vector<Alert> out;
  out.reserve(alerts.size());
  for (const auto& a : alerts) {
    Alert b = a;
    auto sit = map.find(a.scenario);
    if (sit != map.end() && !sit->second.empty()) {
      const auto& table = sit->second;
      auto rewrite = [&](std::string& value) {
        auto it = table.find(value);
        if (it != table.end()) {
          value = it->second;
        } else if (looks_like_address(value) && unmapped &&
                   reported.emplace(a.scenario, value).second) {
          unmapped(a.scenario + ": " + value);
        }
      };
      if (b.src_ip) rewrite(*b.src_ip);
      if (b.dst_ip) rewrite(*b.dst_ip);
      if (auto it = table.find(b.host); it != table.end()) b.host = it->second;
      for (auto& [k, v] : b.attributes)
        if (auto it = table.find(v); it != table.end()) v = it->second;
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Alert> dedupe_window(std::span<const Alert> alerts, double window_seconds) {
  std::map<std::tuple<DetectorId, std::string, std::string>, double> last_kept;
  std::vector<Alert> out;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    const auto& a = alerts[i];
    if (i > 0 && a.timestamp < alerts[i - 1].timestamp)
      throw std::invalid_argument("dedupe_window: alerts are not sorted by timestamp");
    auto key = std::make_tuple(a.detector, victim_of(a), attacker_of(a));
    auto it = last_kept.find(key);
    if (it != last_kept.end() && a.timestamp - it->second < window_seconds) continue;
    last_kept[key] = a.timestamp;
    out.push_back(a);
  }
  return out;
}

std::vector<Episode> build_episodes(std::span<const Alert> alerts, const StageMapping& mapping,
                                    double gap_seconds) {
  std::vector<std::size_t> order(alerts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return alerts[x].timestamp < alerts[y].timestamp;
  });
  std::map<std::pair<std::string, std::string>, std::vector<Episode>> runs;
  for (auto i : order) {
    const auto& a = alerts[i];
    auto stage = mapping.stage(a.detector);
    if (!stage) continue;
    auto& list = runs[{attacker_of(a), victim_of(a)}];
    if (list.empty() || list.back().stage != *stage || a.timestamp - list.back().end > gap_seconds) {
      list.push_back({attacker_of(a), victim_of(a), *stage, a.timestamp, a.timestamp, {}, 0});
    }
    auto& ep = list.back();
    ep.end = a.timestamp;
    ++ep.alert_count;
    if (a.dst_port) ep.services.insert(*a.dst_port);
  }
  std::vector<Episode> out;
  for (auto& [key, list] : runs) std::move(list.begin(), list.end(), std::back_inserter(out));
  return out;
}

std::string GraphNode::key() const {
  std::string k = stage;
  k += '|';
  bool first = true;
  for (int s : services) {
    if (!first) k += ',';
    k += std::to_string(s);
    first = false;
  }
  return k;
}

std::string GraphNode::label() const {
  if (services.empty()) return stage;
  std::string ports;
  for (int s : services) {
    if (!ports.empty()) ports += ',';
    ports += std::to_string(s);
  }
  return stage + "\n" + ports;
}

AttackGraph build_graph(std::span<const Episode> episodes, const std::string& victim,
                        const GraphOptions& options) {
  std::map<std::string, std::vector<const Episode*>> per_attacker;
  for (const auto& e : episodes)
    if (e.victim == victim) per_attacker[e.attacker].push_back(&e);
  for (auto& [attacker, list] : per_attacker)
    std::stable_sort(list.begin(), list.end(),
                     [](const Episode* a, const Episode* b) { return a->start < b->start; });

  std::map<GraphNode, std::set<std::string>> support;
  for (const auto& [attacker, list] : per_attacker)
    for (const auto* e : list) support[GraphNode{e->stage, e->services}].insert(attacker);

  AttackGraph g;
  g.victim = victim;
  for (const auto& [attacker, list] : per_attacker) {
    std::optional<GraphNode> prev;
    for (const auto* e : list) {
      GraphNode node{e->stage, e->services};
      if (options.min_node_support > 1 && support[node].size() < options.min_node_support) continue;
      g.nodes.insert(node);
      if (!prev) g.initial[attacker] = node;
      if (prev && *prev != node) g.edges.insert({*prev, node, attacker});
      prev = node;
    }
    if (prev) g.terminal[attacker] = *prev;
  }
  return g;
}

std::vector<std::string> victims_of(std::span<const Episode> episodes) {
  std::set<std::string> v;
  for (const auto& e : episodes) v.insert(e.victim);
  return {v.begin(), v.end()};
}

std::string attacker_color(const std::string& attacker) {
  static const std::map<std::string, std::string> kKnown = {
      {"fox", "#800000"},      {"harrison", "#ff69b4"}, {"russellmitchell", "#d4b000"},
      {"santos", "#8b4513"},   {"shaw", "#800080"},     {"wardbeck", "#008000"},
      {"wheeler", "#ff8c00"},  {"wilson", "#0000ff"},
  };
  static constexpr std::array<const char*, 8> kFallback = {
      "#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#17becf", "#bcbd22", "#7f7f7f", "#e377c2"};
  if (auto it = kKnown.find(attacker); it != kKnown.end()) return it->second;
  std::uint32_t h = 2166136261u;
  for (unsigned char c : attacker) {
    h ^= c;
    h *= 16777619u;
  }
  return kFallback[h % kFallback.size()];
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const AttackGraph& graph) {
  std::map<GraphNode, std::string> ids;
  for (const auto& n : graph.nodes) ids.emplace(n, "n" + std::to_string(ids.size()));
  std::set<GraphNode> terminal, initial;
  for (const auto& [a, n] : graph.terminal) terminal.insert(n);
  for (const auto& [a, n] : graph.initial) initial.insert(n);

  std::ostringstream out;
  out << "digraph " << quoted(graph.victim) << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box, style=rounded];\n";
  for (const auto& [n, id] : ids) {
    out << "  " << id << " [label=" << quoted(n.label());
    if (terminal.contains(n)) out << ", peripheries=2";
    if (initial.contains(n)) out << ", style=\"rounded,bold\"";
    out << "];\n";
  }
  for (const auto& e : graph.edges) {
    out << "  " << ids.at(e.from) << " -> " << ids.at(e.to) << " [color="
        << quoted(attacker_color(e.attacker)) << ", label=" << quoted(e.attacker) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace alertkit
