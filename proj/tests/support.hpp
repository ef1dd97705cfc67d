// Test-only helpers: random corpora, brute-force oracles, a DOT grammar
// checker and transcribed published tables.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "alertkit/aggregation.hpp"
#include "alertkit/graph.hpp"
#include "alertkit/model.hpp"
#include "alertkit/scoring.hpp"

namespace testkit {

using namespace alertkit;

inline Alert make_alert(std::string scenario, double t, std::string detector,
                        std::string host = "web", std::optional<int> dst_port = std::nullopt) {
  Alert a;
  a.scenario = std::move(scenario);
  a.timestamp = t;
  a.detector = DetectorId::parse(detector);
  if (auto ids = a.detector.ids()) a.ids = *ids;
  a.signature = detector;
  a.host = std::move(host);
  a.dst_port = dst_port;
  a.id = a.scenario + ":" + std::to_string(static_cast<long long>(t * 1000)) + ":" + detector;
  return a;
}

inline ScenarioLabels make_labels(std::string name, TimeWindow test,
                                  std::vector<AttackPhaseWindow> phases, double data_end) {
  ScenarioLabels l;
  l.name = std::move(name);
  l.phases = std::move(phases);
  l.test_override = test;
  l.test = test;
  l.data_start = 0.0;
  l.data_end = data_end;
  return l;
}

struct Corpus {
  std::vector<ScenarioLabels> labels;
  std::vector<Alert> alerts;  // sorted by timestamp (stable in generation order)
  std::vector<std::string> detectors;
};

inline const std::vector<std::string>& detector_pool() {
  static const std::vector<std::string> pool = {"W-Acc-Att", "S-Flw-Nmp", "A-Mon-Avg",
                                                "W-Aut-Ssh2", "A-Aud-Com2", "W-All-Evt"};
  return pool;
}

/// Up to 3 scenarios, <= max_detectors detectors, <= 3 phases, <= max_alerts alerts.
inline Corpus random_corpus(std::uint64_t seed, std::size_t max_alerts = 1000,
                            std::size_t max_detectors = 5) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  Corpus c;
  auto pool = detector_pool();
  std::shuffle(pool.begin(), pool.end(), rng);
  c.detectors.assign(pool.begin(), pool.begin() + static_cast<long>(pick(1, max_detectors)));

  std::vector<PhaseName> phase_set(kAllPhases.begin(), kAllPhases.end());
  std::shuffle(phase_set.begin(), phase_set.end(), rng);
  phase_set.resize(pick(1, 3));

  std::size_t scenarios = pick(1, 3);
  for (std::size_t s = 0; s < scenarios; ++s) {
    double test_start = static_cast<double>(pick(0, 200));
    TimeWindow test{test_start, test_start + static_cast<double>(pick(300, 3000))};
    double cursor = test.end + static_cast<double>(pick(0, 500));
    std::vector<AttackPhaseWindow> phases;
    for (auto p : phase_set) {
      if (pick(0, 4) == 0) continue;  // scenario lacks this phase
      double len = static_cast<double>(pick(1, 1500));
      phases.push_back({p, {cursor, cursor + len}});
      cursor += len + static_cast<double>(pick(0, 400));
    }
    if (phases.empty()) {
      phases.push_back({phase_set[0], {cursor, cursor + 100.0}});
      cursor += 100.0;
    }
    c.labels.push_back(make_labels("s" + std::to_string(s), test, std::move(phases), cursor + 500.0));
  }

  std::size_t n = pick(0, max_alerts);
  static const std::vector<std::string> hosts = {"web", "mail", "db"};
  static const std::vector<int> ports = {22, 25, 80, 443};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& lab = c.labels[pick(0, c.labels.size() - 1)];
    double t;
    if (!c.alerts.empty() && pick(0, 2) == 0) {
      t = c.alerts.back().timestamp + static_cast<double>(pick(0, 6)) * 0.5;
    } else if (pick(0, 5) == 0) {
      // window boundaries
      const auto& w = lab.phases[pick(0, lab.phases.size() - 1)].window;
      t = pick(0, 1) ? w.start : w.end;
    } else {
      t = static_cast<double>(pick(0, static_cast<std::size_t>(lab.data_end)));
    }
    std::optional<int> port;
    if (pick(0, 3)) port = ports[pick(0, ports.size() - 1)];
    auto a = make_alert(lab.name, t, c.detectors[pick(0, c.detectors.size() - 1)],
                        hosts[pick(0, hosts.size() - 1)], port);
    a.id = "a" + std::to_string(i);
    a.attributes["k"] = pick(0, 1) ? "x" : "y";
    if (pick(0, 1)) a.attributes["m"] = std::to_string(pick(0, 2));
    c.alerts.push_back(std::move(a));
  }
  std::stable_sort(c.alerts.begin(), c.alerts.end(),
                   [](const Alert& a, const Alert& b) { return a.timestamp < b.timestamp; });
  return c;
}

// ---------------------------------------------------------------- oracles

struct OracleRow {
  PhaseValues robustness{};
  PhaseCounts detected{};
  std::size_t false_positives = 0;
  double detection = 0.0;
};

/// Direct recount over every (detector, scenario, phase) cell.
inline std::map<DetectorId, OracleRow> oracle_scores(const std::vector<Alert>& alerts,
                                                     const std::vector<ScenarioLabels>& labels) {
  std::set<DetectorId> detectors;
  for (const auto& a : alerts)
    for (const auto& l : labels)
      if (l.name == a.scenario) detectors.insert(a.detector);

  auto in_window_of = [](const ScenarioLabels& l, PhaseName p, double t) {
    for (const auto& w : l.phases)
      if (w.phase == p && t >= w.window.start && t < w.window.end) return true;
    return false;
  };
  auto count = [&](const DetectorId& d, const ScenarioLabels& l, auto pred) {
    std::size_t n = 0;
    for (const auto& a : alerts)
      if (a.detector == d && a.scenario == l.name && pred(a.timestamp)) ++n;
    return n;
  };

  std::map<DetectorId, OracleRow> out;
  for (const auto& d : detectors) {
    OracleRow row;
    for (const auto& l : labels) {
      auto n_test = count(d, l, [&](double t) { return t >= l.test.start && t < l.test.end; });
      if (n_test > 0) ++row.false_positives;
    }
    for (std::size_t p = 0; p < kPhaseCount; ++p) {
      auto phase = kAllPhases[p];
      double sum = 0.0;
      std::size_t terms = 0, occurs = 0;
      for (const auto& l : labels) {
        bool has = false;
        double dur = 0.0;
        for (const auto& w : l.phases)
          if (w.phase == phase) {
            has = true;
            dur += w.window.end - w.window.start;
          }
        if (!has) continue;
        ++occurs;
        auto n_attack = count(d, l, [&](double t) { return in_window_of(l, phase, t); });
        auto n_test = count(d, l, [&](double t) { return t >= l.test.start && t < l.test.end; });
        if (n_attack == 0) continue;
        ++row.detected[p];
        double ratio = (double(n_test) / double(n_attack)) * (dur / (l.test.end - l.test.start));
        sum += 1.0 - std::min(1.0, ratio);
        ++terms;
      }
      row.robustness[p] = terms ? sum / double(terms) : 0.0;
      if (occurs) row.detection = std::max(row.detection, row.robustness[p] * double(row.detected[p]) / double(occurs));
    }
    out[d] = row;
  }
  return out;
}

/// Per-scenario gap partition as lists of alert ids, sorted for comparison.
inline std::vector<std::vector<std::string>> oracle_groups(const std::vector<Alert>& alerts,
                                                           double interval) {
  std::map<std::string, std::vector<const Alert*>> by_scenario;
  for (const auto& a : alerts) by_scenario[a.scenario].push_back(&a);
  std::vector<std::vector<std::string>> out;
  for (auto& [s, list] : by_scenario) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Alert* x, const Alert* y) { return x->timestamp < y->timestamp; });
    std::vector<std::string> cur;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && list[i]->timestamp - list[i - 1]->timestamp > interval) {
        out.push_back(cur);
        cur.clear();
      }
      cur.push_back(list[i]->id);
    }
    if (!cur.empty()) out.push_back(cur);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// For each alert scan backwards for the latest kept alert with the same key.
inline std::vector<std::string> oracle_dedupe(const std::vector<Alert>& alerts, double window) {
  std::vector<bool> kept(alerts.size(), false);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    const auto& a = alerts[i];
    bool keep = true;
    for (std::size_t j = i; j-- > 0;) {
      const auto& b = alerts[j];
      if (!kept[j] || b.detector != a.detector || b.host != a.host || b.scenario != a.scenario) continue;
      keep = a.timestamp - b.timestamp >= window;
      break;
    }
    kept[i] = keep;
    if (keep) out.push_back(a.id);
  }
  return out;
}

inline std::vector<Episode> oracle_episodes(const std::vector<Alert>& alerts,
                                            const StageMapping& mapping, double gap) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& a : alerts) pairs.insert({a.scenario, a.host});
  std::vector<Episode> out;
  for (const auto& [attacker, victim] : pairs) {
    std::vector<const Alert*> list;
    for (const auto& a : alerts)
      if (a.scenario == attacker && a.host == victim && mapping.stage(a.detector)) list.push_back(&a);
    std::stable_sort(list.begin(), list.end(),
                     [](const Alert* x, const Alert* y) { return x->timestamp < y->timestamp; });
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto stage = *mapping.stage(list[i]->detector);
      bool fresh = i == 0 || out.back().stage != stage ||
                   list[i]->timestamp - list[i - 1]->timestamp > gap;
      if (fresh) out.push_back({attacker, victim, stage, list[i]->timestamp, list[i]->timestamp, {}, 0});
      out.back().end = list[i]->timestamp;
      out.back().alert_count++;
      if (list[i]->dst_port) out.back().services.insert(*list[i]->dst_port);
    }
  }
  return out;
}

/// Quadratic DP longest common subsequence.
inline std::size_t oracle_lcs(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::vector<std::size_t>> dp(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1 : std::max(dp[i - 1][j], dp[i][j - 1]);
  return dp[a.size()][b.size()];
}

// ---------------------------------------------------------------- DOT checker

/// Recursive-descent check of the DOT language (graph, node, edge, attribute
/// and subgraph statements). Records node and edge statement counts.
class DotChecker {
 public:
  struct Result {
    bool ok = false;
    std::string error;
    bool directed = false;
    std::size_t node_stmts = 0;
    std::size_t edge_stmts = 0;
    std::set<std::string> declared_nodes;
    std::vector<std::pair<std::string, std::string>> edges;
  };

  static Result check(const std::string& text) {
    DotChecker c;
    try {
      c.tokenize(text);
      c.graph();
      c.result_.ok = true;
    } catch (const std::runtime_error& e) {
      c.result_.error = e.what();
    }
    return c.result_;
  }

 private:
  enum class Kind { kId, kPunct, kArrow, kEnd };
  struct Token {
    Kind kind;
    std::string text;
  };

  DotChecker() = default;

  [[noreturn]] static void fail(const std::string& what) { throw std::runtime_error(what); }

  void tokenize(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
        auto e = s.find("*/", i + 2);
        if (e == std::string::npos) fail("unterminated comment");
        i = e + 2;
      } else if (c == '#' && (i == 0 || s[i - 1] == '\n')) {
        while (i < s.size() && s[i] != '\n') ++i;
      } else if (c == '-' && i + 1 < s.size() && (s[i + 1] == '>' || s[i + 1] == '-')) {
        toks_.push_back({Kind::kArrow, s.substr(i, 2)});
        i += 2;
      } else if (std::string("{}[];,=:").find(c) != std::string::npos) {
        toks_.push_back({Kind::kPunct, std::string(1, c)});
        ++i;
      } else if (c == '"') {
        std::string v;
        ++i;
        bool closed = false;
        while (i < s.size()) {
          if (s[i] == '\\' && i + 1 < s.size()) {
            v += s[i];
            v += s[i + 1];
            i += 2;
          } else if (s[i] == '"') {
            closed = true;
            ++i;
            break;
          } else {
            v += s[i++];
          }
        }
        if (!closed) fail("unterminated string");
        toks_.push_back({Kind::kId, v});
      } else if (c == '<') {
        int depth = 0;
        std::size_t j = i;
        for (; j < s.size(); ++j) {
          if (s[j] == '<') ++depth;
          if (s[j] == '>' && --depth == 0) break;
        }
        if (j >= s.size()) fail("unterminated html string");
        toks_.push_back({Kind::kId, s.substr(i, j - i + 1)});
        i = j + 1;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
                 static_cast<unsigned char>(c) >= 128) {
        std::size_t j = i;
        bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-';
        while (j < s.size()) {
          unsigned char d = static_cast<unsigned char>(s[j]);
          if (numeric ? (std::isdigit(d) || d == '.' || (j == i && d == '-'))
                      : (std::isalnum(d) || d == '_' || d >= 128))
            ++j;
          else
            break;
        }
        if (j == i) fail(std::string("unexpected character '") + c + "'");
        toks_.push_back({Kind::kId, s.substr(i, j - i)});
        i = j;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    toks_.push_back({Kind::kEnd, ""});
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is_punct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Kind::kPunct && peek(k).text == p;
  }
  static bool keyword(const Token& t, const char* kw) {
    if (t.kind != Kind::kId) return false;
    std::string lower;
    for (char ch : t.text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return lower == kw;
  }
  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "' near '" + peek().text + "'");
    ++pos_;
  }
  std::string id() {
    if (peek().kind != Kind::kId) fail("expected identifier near '" + peek().text + "'");
    return toks_[pos_++].text;
  }

  void graph() {
    if (keyword(peek(), "strict")) ++pos_;
    if (keyword(peek(), "digraph")) result_.directed = true;
    else if (!keyword(peek(), "graph")) fail("expected graph or digraph");
    ++pos_;
    if (peek().kind == Kind::kId) ++pos_;
    expect("{");
    stmt_list();
    expect("}");
    if (peek().kind != Kind::kEnd) fail("trailing input after graph");
  }

  void stmt_list() {
    while (!is_punct("}")) {
      if (peek().kind == Kind::kEnd) fail("unexpected end of input");
      stmt();
      if (is_punct(";")) ++pos_;
    }
  }

  void attr_list() {
    while (is_punct("[")) {
      ++pos_;
      while (!is_punct("]")) {
        id();
        if (is_punct("=")) {
          ++pos_;
          id();
        }
        if (is_punct(";") || is_punct(",")) ++pos_;
      }
      ++pos_;
    }
  }

  std::string node_id() {
    auto n = id();
    if (is_punct(":")) {
      ++pos_;
      id();
      if (is_punct(":")) {
        ++pos_;
        id();
      }
    }
    return n;
  }

  // Returns the node name of a plain operand, empty for a subgraph.
  std::string operand() {
    if (keyword(peek(), "subgraph") || is_punct("{")) {
      subgraph();
      return {};
    }
    return node_id();
  }

  void subgraph() {
    if (keyword(peek(), "subgraph")) {
      ++pos_;
      if (peek().kind == Kind::kId) ++pos_;
    }
    expect("{");
    stmt_list();
    expect("}");
  }

  void stmt() {
    const auto& t = peek();
    if (keyword(t, "graph") || keyword(t, "node") || keyword(t, "edge")) {
      ++pos_;
      if (!is_punct("[")) fail("attribute statement needs an attribute list");
      attr_list();
      return;
    }
    if (t.kind == Kind::kId && is_punct("=", 1)) {
      pos_ += 2;
      id();
      return;
    }
    auto first = operand();
    if (peek().kind == Kind::kArrow) {
      std::string prev = first;
      while (peek().kind == Kind::kArrow) {
        if ((peek().text == "->") != result_.directed) fail("edge operator does not match graph type");
        ++pos_;
        auto next = operand();
        result_.edges.push_back({prev, next});
        prev = next;
      }
      ++result_.edge_stmts;
      attr_list();
      return;
    }
    if (!first.empty()) {
      ++result_.node_stmts;
      result_.declared_nodes.insert(first);
    }
    attr_list();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Result result_;
};

// ---------------------------------------------------------------- published tables

struct PublishedRow {
  const char* detector;
  std::array<int, kPhaseCount> scenarios;  // 0 where the cell is blank
  int false_positives;
  double robustness;
  double detection;
};

/// Scenario counts and scores per detector, in published order.
inline const std::vector<PublishedRow>& published_detector_table() {
  static const std::vector<PublishedRow> rows = {
      {"W-All-Mul3", {0, 5, 8, 8, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"W-Acc-Sus", {0, 0, 6, 8, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"W-Acc-Att", {0, 0, 0, 8, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"W-Err-Fbd2", {0, 5, 3, 8, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"W-Aut-Ssh2", {0, 8, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"W-Aut-Uid", {0, 0, 0, 0, 0, 0, 0, 8, 0, 0}, 0, 1.0, 1.0},
      {"W-Aut-Sud", {0, 0, 0, 0, 0, 0, 0, 8, 0, 0}, 0, 1.0, 1.0},
      {"W-Err-Fbd1", {0, 0, 8, 4, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"A-Aud-Com4", {0, 0, 0, 0, 0, 0, 0, 3, 8, 0}, 0, 1.0, 1.0},
      {"A-Aud-Com2", {0, 0, 0, 0, 0, 0, 0, 8, 0, 0}, 0, 1.0, 1.0},
      {"A-Aud-Com6", {0, 0, 0, 0, 0, 1, 0, 8, 0, 0}, 0, 1.0, 1.0},
      {"A-Acc-Val1", {0, 0, 8, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 1.0},
      {"A-Acc-Ent2", {0, 0, 0, 0, 8, 7, 7, 0, 0, 0}, 0, 1.0, 1.0},
      {"W-Acc-400", {0, 7, 8, 8, 0, 1, 0, 0, 0, 0}, 4, 1.0, 1.0},
      {"A-All-Evt", {0, 8, 8, 8, 0, 0, 0, 8, 1, 1}, 2, 1.0, 1.0},
      {"W-Acc-500", {0, 0, 8, 4, 0, 0, 0, 0, 0, 0}, 1, 1.0, 1.0},
      {"A-Acc-Val2", {0, 5, 8, 8, 0, 0, 0, 0, 0, 0}, 2, 1.0, 1.0},
      {"W-Aut-Pam1", {0, 0, 0, 0, 0, 0, 0, 8, 0, 0}, 1, 1.0, 1.0},
      {"A-Acc-Chr2", {0, 0, 8, 8, 0, 0, 0, 0, 0, 1}, 1, 1.0, 1.0},
      {"S-Smt-Wel", {0, 7, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.88},
      {"S-Smt-Rep", {0, 7, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.88},
      {"S-Flw-Nmp", {0, 7, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.88},
      {"S-Tls-Ssl", {0, 7, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.88},
      {"W-All-Ids", {0, 7, 1, 2, 2, 5, 0, 0, 0, 4}, 6, 1.0, 0.87},
      {"A-Mon-Avg", {0, 0, 0, 2, 0, 6, 0, 0, 0, 1}, 4, 0.94, 0.8},
      {"A-Mon-Rng", {0, 0, 0, 0, 0, 5, 0, 0, 0, 0}, 0, 1.0, 0.71},
      {"W-All-Evt", {5, 7, 5, 4, 5, 7, 3, 2, 1, 7}, 8, 0.8, 0.7},
      {"W-All-Mul1", {5, 6, 1, 3, 3, 6, 1, 1, 0, 5}, 8, 0.81, 0.61},
      {"S-Tls-Rec", {5, 7, 5, 4, 6, 6, 3, 1, 0, 7}, 8, 0.57, 0.5},
      {"A-Acc-Clc", {0, 1, 1, 4, 2, 3, 1, 0, 0, 1}, 1, 0.99, 0.49},
      {"W-All-Mul2", {4, 4, 2, 3, 0, 5, 1, 0, 0, 4}, 7, 0.9, 0.45},
      {"S-Htt-Mat", {0, 1, 0, 0, 0, 3, 0, 0, 0, 0}, 2, 0.94, 0.4},
      {"S-Tls-Typ", {0, 1, 2, 1, 3, 1, 0, 0, 0, 0}, 0, 1.0, 0.38},
      {"A-Aud-Com3", {0, 0, 0, 0, 0, 0, 0, 3, 0, 0}, 0, 1.0, 0.38},
      {"W-Acc-Brt", {0, 0, 3, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.38},
      {"W-Acc-Cms", {0, 0, 3, 1, 0, 2, 0, 0, 0, 4}, 5, 1.0, 0.37},
      {"S-Flw-Apt", {0, 0, 0, 1, 0, 3, 0, 0, 0, 0}, 8, 0.82, 0.35},
      {"W-Mai-Inv", {0, 0, 0, 0, 0, 1, 0, 0, 0, 3}, 5, 0.8, 0.3},
      {"W-Sys-Fai", {0, 0, 0, 0, 0, 1, 0, 0, 0, 3}, 5, 0.8, 0.3},
      {"W-Aut-Pam2", {0, 0, 0, 0, 0, 1, 0, 0, 0, 3}, 5, 0.8, 0.3},
      {"W-Sys-Dov", {7, 3, 5, 4, 3, 6, 5, 5, 0, 7}, 8, 0.46, 0.29},
      {"S-Tls-Hnd", {5, 3, 3, 4, 3, 6, 3, 1, 0, 7}, 8, 0.42, 0.26},
      {"S-Htt-Res", {0, 2, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.25},
      {"A-Dns-Clc1", {0, 0, 0, 0, 0, 0, 0, 0, 0, 2}, 0, 1.0, 0.25},
      {"A-Dns-Frq", {0, 1, 0, 0, 0, 0, 0, 0, 0, 2}, 1, 1.0, 0.25},
      {"A-Acc-Frq", {0, 0, 0, 2, 0, 1, 2, 0, 0, 0}, 0, 1.0, 0.25},
      {"W-Sys-Cav", {1, 1, 0, 2, 0, 7, 0, 0, 0, 8}, 8, 0.24, 0.24},
      {"S-Dns-Qry4", {0, 0, 0, 0, 0, 2, 0, 0, 0, 2}, 6, 0.85, 0.24},
      {"A-Dns-Clc2", {0, 0, 0, 1, 0, 1, 0, 0, 0, 3}, 5, 0.5, 0.19},
      {"A-Dns-Val1", {0, 0, 0, 0, 0, 1, 0, 0, 0, 0}, 0, 1.0, 0.14},
      {"A-Dns-Chr", {1, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0, 1.0, 0.12},
      {"A-Aud-Com5", {0, 0, 0, 0, 0, 0, 0, 1, 0, 0}, 0, 1.0, 0.12},
      {"S-Dns-Qry3", {2, 1, 1, 2, 1, 1, 2, 1, 1, 1}, 2, 0.88, 0.11},
      {"A-Dns-Ent", {0, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 2, 0.63, 0.08},
  };
  return rows;
}

/// Published rows as ScoreRows carrying the printed detection score.
inline std::vector<ScoreRow> published_score_rows() {
  std::vector<ScoreRow> out;
  for (const auto& r : published_detector_table()) {
    ScoreRow row;
    row.detector = DetectorId::parse(r.detector);
    for (std::size_t p = 0; p < kPhaseCount; ++p) row.detected[p] = static_cast<std::size_t>(r.scenarios[p]);
    row.false_positives = static_cast<std::size_t>(r.false_positives);
    row.detection_score = r.detection;
    row.robustness.fill(r.robustness);
    out.push_back(row);
  }
  return out;
}

struct PublishedFilterCounts {
  const char* scenario;
  std::array<std::size_t, 4> counts;  // all, prioritized, in phases, both
  double combined_rate;               // printed percentage for "both"
};

inline const std::vector<PublishedFilterCounts>& published_filter_table() {
  static const std::vector<PublishedFilterCounts> rows = {
      {"fox", {473104, 420600, 421653, 420112}, 11.20},
      {"harrison", {593948, 425392, 431492, 424974}, 28.45},
      {"russellmitchell", {45544, 11705, 12015, 11230}, 75.34},
      {"santos", {130779, 11709, 13004, 11217}, 91.42},
      {"shaw", {70782, 6667, 6935, 6065}, 91.43},
      {"wardbeck", {91257, 7107, 7040, 6213}, 93.19},
      {"wheeler", {616161, 431319, 432334, 430737}, 30.09},
      {"wilson", {634246, 435538, 440108, 434952}, 31.42},
  };
  return rows;
}

/// Two scenarios of raw Wazuh alerts: one detector fires only inside the Dirb
/// phase of both scenarios, another fires only inside the test windows.
/// Writes <root>/data/<scenario>/wazuh/web.json and <root>/labels.json.
inline void write_synthetic_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  const double day = 86400.0;
  std::string labels = R"({"scenarios":[)";
  const char* names[] = {"alpha", "beta"};
  for (int s = 0; s < 2; ++s) {
    double base = 1642723200.0 + s * 10 * day;
    double scan = base + 2 * day;  // network scans
    double dirb = scan + 3600;     // dirb scan
    double test = scan - day;      // derived default test window start
    if (s) labels += ",";
    labels += std::string(R"({"name":")") + names[s] + R"(","data_start":)" + std::to_string(base) +
              R"(,"data_end":)" + std::to_string(base + 4 * day) + R"(,"phases":[)" +
              R"({"phase":"network_scans","start":)" + std::to_string(scan) + R"(,"end":)" +
              std::to_string(scan + 600) + "}," + R"({"phase":"dirb_scan","start":)" + std::to_string(dirb) +
              R"(,"end":)" + std::to_string(dirb + 900) + "}]}";
    std::string lines;
    auto line = [&](double t, const char* sig, int port) {
      lines += R"({"@timestamp":")" + format_timestamp(t) + R"(","agent":{"name":"web"},"rule":{"description":")" +
               sig + R"(","id":"1"},"data":{"srcip":"10.0.0.)" + std::to_string(s + 1) +
               R"(","dstport":")" + std::to_string(port) + "\"}}\n";
    };
    for (int i = 0; i < 40; ++i) line(dirb + 10 + i * 20, "Common web attack.", 80);
    for (int i = 0; i < 25; ++i) line(test + 100 + i * 600, "Web server 400 error code.", 80);
    fs::create_directories(root / "data" / names[s] / "wazuh");
    std::ofstream(root / "data" / names[s] / "wazuh" / "web.json") << lines;
  }
  labels += "]}";
  std::ofstream(root / "labels.json") << labels;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("alertkit-" + tag + "-" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testkit
