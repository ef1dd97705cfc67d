#include "alertkit/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alertkit/resources.hpp"

namespace alertkit {

namespace {

std::string exact_key(SourceIds ids, std::string_view signature) {
  std::string key(to_string(ids));
  key += '\x1f';
  key += signature;
  return key;
}

}  // namespace

SignatureTable::SignatureTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.match == Match::kExact)
      exact_.try_emplace(exact_key(e.ids, e.signature), i);
    else
      prefix_.push_back(i);
  }
}

const SignatureTable& SignatureTable::builtin() {
  static const SignatureTable table = parse(resources::signatures_json());
  return table;
}

SignatureTable SignatureTable::parse(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("signature table is not valid JSON: ") + e.what());
  }
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw ConfigError("signature table needs an 'entries' array");
  std::vector<Entry> entries;
  for (const auto& j : doc["entries"]) {
    Entry e;
    auto ids = parse_source_ids(j.value("ids", std::string()));
    if (!ids) throw ConfigError("signature entry with unknown ids: " + j.dump());
    e.ids = *ids;
    e.signature = j.value("signature", std::string());
    if (e.signature.empty()) throw ConfigError("signature entry without text: " + j.dump());
    auto match = j.value("match", std::string("exact"));
    if (match == "prefix")
      e.match = Match::kPrefix;
    else if (match != "exact")
      throw ConfigError("unknown match rule '" + match + "'");
    e.detector = DetectorId::parse(j.value("detector", std::string()));
    if (e.detector.is_unknown() || e.detector.ids() != e.ids)
      throw ConfigError("detector does not belong to its IDS: " + j.dump());
    entries.push_back(std::move(e));
  }
  return SignatureTable(std::move(entries));
}

SignatureTable SignatureTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open signature table " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

DetectorId SignatureTable::map(SourceIds ids, std::string_view signature) const {
  if (signature.empty()) return DetectorId::unknown();
  std::size_t best = entries_.size();
  if (auto it = exact_.find(exact_key(ids, signature)); it != exact_.end()) best = it->second;
  for (auto i : prefix_) {
    if (i >= best) break;
    const auto& e = entries_[i];
    if (e.ids == ids && signature.starts_with(e.signature)) {
      best = i;
      break;
    }
  }
  return best < entries_.size() ? entries_[best].detector : DetectorId::unknown();
}

std::vector<DetectorId> SignatureTable::detectors() const {
  std::set<DetectorId> ids;
  for (const auto& e : entries_) ids.insert(e.detector);
  return {ids.begin(), ids.end()};
}

bool SignatureTable::contains(const DetectorId& id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.detector == id; });
}

DetectorId map_signature(SourceIds ids, std::string_view signature,
                         const SignatureTable& table) {
  return table.map(ids, signature);
}

}  // namespace alertkit
