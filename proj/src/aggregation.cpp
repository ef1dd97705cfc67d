#include "alertkit/aggregation.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace alertkit {

using nlohmann::json;

std::vector<DetectorId> AlertGroup::detector_sequence() const {
  std::vector<DetectorId> seq;
  seq.reserve(alerts.size());
  for (const auto& a : alerts) seq.push_back(a.detector);
  return seq;
}

namespace {

AlertGroup open_group(const Alert& first, std::size_t index) {
  AlertGroup g;
  g.scenario = first.scenario;
  g.index = index;
  g.start = g.end = first.timestamp;
  return g;
}

void append(AlertGroup& g, const Alert& a) {
  g.alerts.push_back(a);
  g.end = a.timestamp;
  ++g.detector_bag[a.detector];
}

}  // namespace

std::vector<AlertGroup> group_by_gap(std::span<const Alert> alerts, double interval_seconds) {
  if (!(interval_seconds >= 0.0)) throw std::invalid_argument("interval time must be >= 0");
  std::vector<AlertGroup> groups;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    const auto& a = alerts[i];
    if (i > 0 && a.timestamp < alerts[i - 1].timestamp)
      throw std::invalid_argument("group_by_gap: alerts are not sorted by timestamp");
    if (groups.empty() || a.timestamp - alerts[i - 1].timestamp > interval_seconds)
      groups.push_back(open_group(a, groups.size()));
    append(groups.back(), a);
  }
  return groups;
}

std::vector<AlertGroup> group_scenarios(std::span<const Alert> alerts, double interval_seconds) {
  std::map<std::string, std::vector<Alert>> by_scenario;
  for (const auto& a : alerts) by_scenario[a.scenario].push_back(a);
  std::vector<AlertGroup> out;
  for (auto& [name, list] : by_scenario) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Alert& x, const Alert& y) { return x.timestamp < y.timestamp; });
    auto groups = group_by_gap(list, interval_seconds);
    std::move(groups.begin(), groups.end(), std::back_inserter(out));
  }
  return out;
}

GroupProfile profile_of(const AlertGroup& group) {
  return {group.detector_bag, group.detector_sequence()};
}

std::size_t lcs_length(std::span<const int> a, std::span<const int> b) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  if (m == 0) return 0;
  const std::size_t words = (m + 63) / 64;
  std::unordered_map<int, std::vector<std::uint64_t>> masks;
  for (std::size_t i = 0; i < m; ++i) {
    auto& mask = masks[a[i]];
    if (mask.empty()) mask.assign(words, 0);
    mask[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (int c : b) {
    auto it = masks.find(c);
    if (it == masks.end()) continue;
    const auto& mask = it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t u = v[w] & mask[w];
      std::uint64_t t = v[w] + u;
      std::uint64_t c1 = t < v[w] ? 1 : 0;
      std::uint64_t s = t + carry;
      std::uint64_t c2 = s < t ? 1 : 0;
      carry = c1 | c2;
      v[w] = s | (v[w] & ~mask[w]);
    }
  }
  std::size_t ones = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = v[w];
    if (w == words - 1 && m % 64 != 0) word &= (std::uint64_t{1} << (m % 64)) - 1;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  return m - ones;
}

namespace {

std::vector<int> encode(const std::vector<DetectorId>& seq, const std::map<DetectorId, int>& sym) {
  std::vector<int> out;
  out.reserve(seq.size());
  for (const auto& d : seq) out.push_back(sym.at(d));
  return out;
}

std::vector<int> collapse_runs(const std::vector<int>& seq) {
  std::vector<int> out;
  for (int s : seq)
    if (out.empty() || out.back() != s) out.push_back(s);
  return out;
}

}  // namespace

SimilarityParts similarity_parts(const GroupProfile& a, const GroupProfile& b,
                                 std::size_t max_exact_sequence) {
  SimilarityParts parts;
  std::map<DetectorId, int> sym;
  std::size_t shared = 0;
  double freq_sum = 0.0;
  for (const auto& [d, c] : a.bag) sym.emplace(d, static_cast<int>(sym.size()));
  for (const auto& [d, c] : b.bag) {
    sym.emplace(d, static_cast<int>(sym.size()));
    if (auto it = a.bag.find(d); it != a.bag.end()) {
      ++shared;
      double lo = static_cast<double>(std::min(c, it->second));
      double hi = static_cast<double>(std::max(c, it->second));
      freq_sum += hi > 0.0 ? lo / hi : 1.0;
    }
  }
  parts.detectors = sym.empty() ? 1.0 : static_cast<double>(shared) / static_cast<double>(sym.size());
  parts.frequency = shared == 0 ? 0.0 : freq_sum / static_cast<double>(shared);

  auto sa = encode(a.sequence, sym);
  auto sb = encode(b.sequence, sym);
  if (std::max(sa.size(), sb.size()) > max_exact_sequence) {
    sa = collapse_runs(sa);
    sb = collapse_runs(sb);
    if (sa.size() > max_exact_sequence) sa.resize(max_exact_sequence);
    if (sb.size() > max_exact_sequence) sb.resize(max_exact_sequence);
  }
  auto longer = std::max(sa.size(), sb.size());
  parts.sequence = longer == 0 ? 1.0
                               : static_cast<double>(lcs_length(sa, sb)) / static_cast<double>(longer);
  return parts;
}

double group_similarity(const GroupProfile& a, const GroupProfile& b,
                        const SimilarityWeights& w) {
  auto p = similarity_parts(a, b);
  double total = w.detectors + w.frequency + w.sequence;
  if (!(total > 0.0)) throw std::invalid_argument("similarity weights must sum to > 0");
  double v = (w.detectors * p.detectors + w.frequency * p.frequency + w.sequence * p.sequence) / total;
  return std::clamp(v, 0.0, 1.0);
}

double group_similarity(const AlertGroup& a, const AlertGroup& b, const SimilarityWeights& w) {
  return group_similarity(profile_of(a), profile_of(b), w);
}

double alert_similarity(const Alert& a, const Alert& b) {
  if (a.detector != b.detector) return 0.0;
  std::size_t shared = 0, equal = 0;
  for (const auto& [k, v] : a.attributes) {
    auto it = b.attributes.find(k);
    if (it == b.attributes.end()) continue;
    ++shared;
    if (it->second == v) ++equal;
  }
  return shared == 0 ? 1.0 : static_cast<double>(equal) / static_cast<double>(shared);
}

double template_similarity(const AlertTemplate& a, const AlertTemplate& b) {
  if (a.detector != b.detector) return 0.0;
  std::size_t shared = 0, equal = 0;
  for (const auto& [k, v] : a.attributes) {
    auto it = b.attributes.find(k);
    if (it == b.attributes.end()) continue;
    ++shared;
    if (!v || !it->second || *v == *it->second) ++equal;
  }
  return shared == 0 ? 1.0 : static_cast<double>(equal) / static_cast<double>(shared);
}

namespace {

AlertTemplate template_from(const Alert& a) {
  AlertTemplate t;
  t.detector = a.detector;
  for (const auto& [k, v] : a.attributes) t.attributes.emplace(k, v);
  return t;
}

/// Keeps keys present in both; conflicting values become wildcards.
void absorb_attributes(AlertTemplate& into, const AlertTemplate& other) {
  for (auto it = into.attributes.begin(); it != into.attributes.end();) {
    auto o = other.attributes.find(it->first);
    if (o == other.attributes.end()) {
      it = into.attributes.erase(it);
      continue;
    }
    if (it->second && (!o->second || *o->second != *it->second)) it->second.reset();
    ++it;
  }
}

void check_threshold(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

std::vector<AlertTemplate> templates_of(const AlertGroup& group, double alert_threshold) {
  check_threshold(alert_threshold, "alert threshold");
  std::vector<AlertTemplate> out;
  for (const auto& a : group.alerts) {
    auto t = template_from(a);
    std::optional<std::size_t> best;
    double best_sim = -1.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].detector != a.detector) continue;
      double s = template_similarity(out[i], t);
      if (s >= alert_threshold && s > best_sim) {
        best = i;
        best_sim = s;
      }
    }
    if (best) {
      absorb_attributes(out[*best], t);
      ++out[*best].min_count;
      ++out[*best].max_count;
    } else {
      t.min_count = t.max_count = 1;
      out.push_back(std::move(t));
    }
  }
  return out;
}

GroupProfile MetaAlert::representative() const {
  GroupProfile p;
  for (const auto& t : templates) {
    p.bag[t.detector] += t.max_count;
    p.sequence.insert(p.sequence.end(), t.max_count, t.detector);
  }
  std::erase_if(p.bag, [](const auto& kv) { return kv.second == 0; });
  return p;
}

namespace {

GroupRef ref_of(const AlertGroup& g) {
  return {g.id(), g.scenario, g.start, g.end, g.alerts.size(), g.detector_bag};
}

void merge_templates(MetaAlert& meta, std::vector<AlertTemplate> incoming, double alert_threshold) {
  struct Candidate {
    double sim;
    std::size_t meta_idx;
    std::size_t group_idx;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < meta.templates.size(); ++i)
    for (std::size_t j = 0; j < incoming.size(); ++j) {
      if (meta.templates[i].detector != incoming[j].detector) continue;
      double s = template_similarity(meta.templates[i], incoming[j]);
      if (s >= alert_threshold) cands.push_back({s, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    if (x.meta_idx != y.meta_idx) return x.meta_idx < y.meta_idx;
    return x.group_idx < y.group_idx;
  });
  std::vector<bool> meta_used(meta.templates.size(), false), group_used(incoming.size(), false);
  for (const auto& c : cands) {
    if (meta_used[c.meta_idx] || group_used[c.group_idx]) continue;
    meta_used[c.meta_idx] = group_used[c.group_idx] = true;
    auto& t = meta.templates[c.meta_idx];
    const auto& g = incoming[c.group_idx];
    absorb_attributes(t, g);
    t.min_count = std::min(t.min_count, g.min_count);
    t.max_count = std::max(t.max_count, g.max_count);
  }
  for (std::size_t i = 0; i < meta.templates.size(); ++i)
    if (!meta_used[i]) meta.templates[i].min_count = 0;
  for (std::size_t j = 0; j < incoming.size(); ++j) {
    if (group_used[j]) continue;
    auto t = std::move(incoming[j]);
    t.min_count = 0;
    meta.templates.push_back(std::move(t));
  }
}

void merge_group(MetaAlert& meta, const AlertGroup& group, std::vector<AlertTemplate> incoming,
                 double alert_threshold) {
  merge_templates(meta, std::move(incoming), alert_threshold);
  meta.members.push_back(ref_of(group));
}

// Folds meta-alerts together until no pair reaches the group threshold, so the
// output is stable under re-merging. Most similar pair first.
void consolidate(std::vector<MetaAlert>& metas, std::vector<GroupProfile>& reps,
                 const MergeOptions& options) {
  const std::size_t n = metas.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = group_similarity(reps[i], reps[j], options.weights);
  for (;;) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j)
        if (alive[j] && sim[i][j] > best) {
          best = sim[i][j];
          bi = i;
          bj = j;
        }
    }
    if (best < options.group_threshold) break;
    merge_templates(metas[bi], metas[bj].templates, options.alert_threshold);
    for (auto& m : metas[bj].members) metas[bi].members.push_back(std::move(m));
    alive[bj] = false;
    reps[bi] = metas[bi].representative();
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi) continue;
      double s = group_similarity(reps[std::min(bi, k)], reps[std::max(bi, k)], options.weights);
      sim[std::min(bi, k)][std::max(bi, k)] = s;
    }
  }
  std::vector<MetaAlert> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (alive[i]) kept.push_back(std::move(metas[i]));
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = "m" + std::to_string(i);
  metas = std::move(kept);
}

}  // namespace

std::vector<MetaAlert> merge_into_meta_alerts(std::span<const AlertGroup> groups,
                                              const MergeOptions& options) {
  check_threshold(options.group_threshold, "group threshold");
  check_threshold(options.alert_threshold, "alert threshold");
  std::vector<const AlertGroup*> order;
  for (const auto& g : groups)
    if (!g.alerts.empty()) order.push_back(&g);
  std::stable_sort(order.begin(), order.end(), [](const AlertGroup* a, const AlertGroup* b) {
    if (a->start != b->start) return a->start < b->start;
    if (a->scenario != b->scenario) return a->scenario < b->scenario;
    return a->index < b->index;
  });

  std::vector<MetaAlert> metas;
  std::vector<GroupProfile> reps;
  for (const AlertGroup* g : order) {
    auto profile = profile_of(*g);
    std::optional<std::size_t> best;
    double best_sim = -1.0;
    for (std::size_t i = 0; i < metas.size(); ++i) {
      double s = group_similarity(profile, reps[i], options.weights);
      if (s > best_sim) {
        best_sim = s;
        best = i;
      }
    }
    auto incoming = templates_of(*g, options.alert_threshold);
    if (best && best_sim >= options.group_threshold) {
      merge_group(metas[*best], *g, std::move(incoming), options.alert_threshold);
      reps[*best] = metas[*best].representative();
    } else {
      MetaAlert m;
      m.id = "m" + std::to_string(metas.size());
      m.templates = std::move(incoming);
      m.members.push_back(ref_of(*g));
      reps.push_back(m.representative());
      metas.push_back(std::move(m));
    }
  }
  consolidate(metas, reps, options);
  return metas;
}

std::size_t distinct_alert_count(std::span<const MetaAlert> metas) {
  std::size_t n = 0;
  for (const auto& m : metas) n += m.templates.size();
  return n;
}

AlertGroup representative_group(const MetaAlert& meta, std::size_t index) {
  AlertGroup g;
  g.scenario = meta.id;
  g.index = index;
  double t = static_cast<double>(index);
  g.start = g.end = t;
  for (const auto& tpl : meta.templates) {
    for (std::size_t k = 0; k < tpl.max_count; ++k) {
      Alert a;
      a.id = meta.id + ":" + std::to_string(g.alerts.size());
      a.scenario = meta.id;
      a.timestamp = t;
      a.detector = tpl.detector;
      a.signature = tpl.detector.str();
      for (const auto& [key, v] : tpl.attributes) a.attributes.emplace(key, v.value_or("*"));
      append(g, a);
    }
  }
  return g;
}

json to_json(const MetaAlert& meta) {
  json templates = json::array();
  for (const auto& t : meta.templates) {
    json attrs = json::object();
    for (const auto& [k, v] : t.attributes) attrs[k] = v ? json(*v) : json(nullptr);
    templates.push_back({{"detector", t.detector.str()},
                         {"attributes", attrs},
                         {"frequency", {t.min_count, t.max_count}}});
  }
  json members = json::array();
  for (const auto& m : meta.members) {
    json bag = json::object();
    for (const auto& [d, c] : m.detectors) bag[d.str()] = c;
    members.push_back({{"group", m.group},
                       {"scenario", m.scenario},
                       {"start", m.start},
                       {"end", m.end},
                       {"alerts", m.alerts},
                       {"detectors", bag}});
  }
  return {{"id", meta.id}, {"templates", templates}, {"members", members}};
}

MetaAlert meta_alert_from_json(const json& j) {
  MetaAlert m;
  m.id = j.at("id").get<std::string>();
  for (const auto& t : j.at("templates")) {
    AlertTemplate tpl;
    tpl.detector = DetectorId::parse(t.at("detector").get<std::string>());
    for (const auto& [k, v] : t.at("attributes").items())
      tpl.attributes.emplace(k, v.is_null() ? TemplateValue{} : TemplateValue{v.get<std::string>()});
    tpl.min_count = t.at("frequency").at(0).get<std::size_t>();
    tpl.max_count = t.at("frequency").at(1).get<std::size_t>();
    m.templates.push_back(std::move(tpl));
  }
  for (const auto& g : j.at("members")) {
    GroupRef ref;
    ref.group = g.at("group").get<std::string>();
    ref.scenario = g.at("scenario").get<std::string>();
    ref.start = g.at("start").get<double>();
    ref.end = g.at("end").get<double>();
    ref.alerts = g.at("alerts").get<std::size_t>();
    for (const auto& [d, c] : g.at("detectors").items())
      ref.detectors.emplace(DetectorId::parse(d), c.get<std::size_t>());
    m.members.push_back(std::move(ref));
  }
  return m;
}

void write_meta_alerts(const std::string& path, std::span<const MetaAlert> metas) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << json{{"format", "alertkit-meta-alerts"}, {"version", 1}}.dump() << '\n';
  for (const auto& m : metas) out << to_json(m).dump() << '\n';
}

std::vector<MetaAlert> read_meta_alerts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || json::parse(line).value("format", "") != "alertkit-meta-alerts")
    throw std::runtime_error(path + " is not a meta-alert store");
  std::vector<MetaAlert> out;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(meta_alert_from_json(json::parse(line)));
  return out;
}

std::string render_meta_summary(std::span<const MetaAlert> metas, std::size_t max_items) {
  std::ostringstream out;
  auto bag_text = [&](const DetectorBag& bag) {
    std::vector<std::pair<DetectorId, std::size_t>> items(bag.begin(), bag.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::string s;
    for (std::size_t i = 0; i < items.size() && i < max_items; ++i) {
      if (i) s += ", ";
      s += items[i].first.str() + " x" + std::to_string(items[i].second);
    }
    if (items.size() > max_items) s += ", ...";
    return s;
  };
  for (const auto& m : metas) {
    std::vector<std::string> scenarios;
    for (const auto& g : m.members)
      if (std::find(scenarios.begin(), scenarios.end(), g.scenario) == scenarios.end())
        scenarios.push_back(g.scenario);
    out << m.id << " (" << m.members.size() << (m.members.size() == 1 ? " group" : " groups")
        << "; " << scenarios.size() << (scenarios.size() == 1 ? " scenario" : " scenarios") << ")\n";
    out << "  alerts:";
    for (std::size_t i = 0; i < m.templates.size() && i < max_items; ++i) {
      const auto& t = m.templates[i];
      out << (i ? ", " : " ") << t.detector.str() << " [" << t.min_count << '-' << t.max_count << ']';
    }
    if (m.templates.size() > max_items) out << ", ... (" << m.templates.size() << " total)";
    out << '\n';
    for (const auto& g : m.members) out << "  " << g.group << ": " << bag_text(g.detectors) << '\n';
  }
  return out.str();
}

}  // namespace alertkit
