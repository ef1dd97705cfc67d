#include "alertkit/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace alertkit {

namespace {

constexpr std::array<std::string_view, kPhaseCount> kPhaseNames = {
    "network_scans",   "service_scans",     "wordpress_scan", "dirb_scan",
    "webshell_upload", "password_cracking", "reverse_shell",  "privilege_escalation",
    "service_stop",    "data_exfiltration",
};

bool is_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) != 0;
  });
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::string_view to_string(SourceIds ids) {
  switch (ids) {
    case SourceIds::kWazuh: return "wazuh";
    case SourceIds::kSuricata: return "suricata";
    case SourceIds::kAminer: return "aminer";
  }
  return "wazuh";
}

std::optional<SourceIds> parse_source_ids(std::string_view text) {
  for (auto ids : kAllSources)
    if (to_string(ids) == text) return ids;
  return std::nullopt;
}

DetectorId DetectorId::parse(std::string_view rendered) {
  if (rendered == "unknown") return {};
  auto d1 = rendered.find('-');
  auto d2 = d1 == std::string_view::npos ? d1 : rendered.find('-', d1 + 1);
  if (d2 == std::string_view::npos || rendered.find('-', d2 + 1) != std::string_view::npos)
    throw ConfigError("malformed detector id: " + std::string(rendered));
  auto head = rendered.substr(0, d1);
  if (head != "W" && head != "S" && head != "A")
    throw ConfigError("detector id has unknown IDS token: " + std::string(rendered));
  if (!is_token(rendered.substr(d1 + 1, d2 - d1 - 1)) || !is_token(rendered.substr(d2 + 1)))
    throw ConfigError("malformed detector id: " + std::string(rendered));
  DetectorId id;
  id.rendered_ = std::string(rendered);
  return id;
}

std::optional<SourceIds> DetectorId::ids() const {
  if (is_unknown()) return std::nullopt;
  switch (rendered_[0]) {
    case 'W': return SourceIds::kWazuh;
    case 'S': return SourceIds::kSuricata;
    default: return SourceIds::kAminer;
  }
}

std::string_view DetectorId::source() const {
  if (is_unknown()) return {};
  std::string_view r = rendered_;
  auto d1 = r.find('-');
  auto d2 = r.find('-', d1 + 1);
  return r.substr(d1 + 1, d2 - d1 - 1);
}

std::string_view DetectorId::event() const {
  if (is_unknown()) return {};
  std::string_view r = rendered_;
  return r.substr(r.rfind('-') + 1);
}

std::string_view to_string(PhaseName phase) { return kPhaseNames[index_of(phase)]; }

std::optional<PhaseName> parse_phase(std::string_view text) {
  for (auto p : kAllPhases)
    if (to_string(p) == text) return p;
  return std::nullopt;
}

bool ScenarioLabels::has_phase(PhaseName phase) const {
  return std::any_of(phases.begin(), phases.end(),
                     [&](const AttackPhaseWindow& w) { return w.phase == phase; });
}

double ScenarioLabels::phase_duration(PhaseName phase) const {
  double total = 0.0;
  for (const auto& w : phases)
    if (w.phase == phase) total += w.window.duration();
  return total;
}

bool ScenarioLabels::in_phase(PhaseName phase, double t) const {
  return std::any_of(phases.begin(), phases.end(), [&](const AttackPhaseWindow& w) {
    return w.phase == phase && w.window.contains(t);
  });
}

std::optional<PhaseName> assign_phase(double timestamp,
                                      const std::vector<AttackPhaseWindow>& windows) {
  const AttackPhaseWindow* best = nullptr;
  for (const auto& w : windows) {
    if (!w.window.contains(timestamp)) continue;
    if (best == nullptr || w.window.start > best->window.start ||
        (w.window.start == best->window.start && w.phase > best->phase))
      best = &w;
  }
  if (best == nullptr) return std::nullopt;
  return best->phase;
}

std::optional<PhaseName> assign_phase(const Alert& alert, const ScenarioLabels& labels) {
  return assign_phase(alert.timestamp, labels.phases);
}

bool in_test_window(const Alert& alert, const ScenarioLabels& labels) {
  return labels.test.contains(alert.timestamp);
}

TestWindow derive_default_test_window(const ScenarioLabels& labels, double duration) {
  if (labels.test_override) return *labels.test_override;
  if (!(duration > 0.0)) throw ConfigError("test window duration must be positive");
  std::optional<double> earliest;
  for (const auto& w : labels.phases)
    if (is_multi_step(w.phase) && (!earliest || w.window.start < *earliest))
      earliest = w.window.start;
  if (!earliest)
    throw ConfigError("scenario '" + labels.name +
                      "' has no multi-step phase to derive a test window from");
  TestWindow derived{*earliest - kTestWindowLeadSeconds,
                     *earliest - kTestWindowLeadSeconds + duration};
  if (derived.start < labels.data_start)
    throw ConfigError("derived test window of scenario '" + labels.name +
                      "' precedes the data start; specify it explicitly");
  for (const auto& w : labels.phases)
    if (derived.overlaps(w.window))
      throw ConfigError("derived test window of scenario '" + labels.name + "' overlaps " +
                        std::string(to_string(w.phase)) + "; specify it explicitly");
  return derived;
}

void validate(const ScenarioLabels& labels) {
  const std::string where = "scenario '" + labels.name + "': ";
  if (!(labels.data_start < labels.data_end))
    throw ConfigError(where + "data_start must precede data_end");
  auto check_window = [&](const TimeWindow& w, std::string_view what) {
    if (!std::isfinite(w.start) || !std::isfinite(w.end) || !(w.start < w.end))
      throw ConfigError(where + std::string(what) + " window must satisfy start < end");
    if (w.start < labels.data_start || w.end > labels.data_end)
      throw ConfigError(where + std::string(what) + " window lies outside the capture");
  };
  for (const auto& w : labels.phases) check_window(w.window, to_string(w.phase));
  check_window(labels.test, "test");
  for (std::size_t i = 0; i < labels.phases.size(); ++i) {
    const auto& a = labels.phases[i];
    if (labels.test.overlaps(a.window))
      throw ConfigError(where + "test window overlaps " + std::string(to_string(a.phase)));
    if (!is_multi_step(a.phase)) continue;
    for (std::size_t j = i + 1; j < labels.phases.size(); ++j) {
      const auto& b = labels.phases[j];
      if (is_multi_step(b.phase) && a.window.overlaps(b.window))
        throw ConfigError(where + "multi-step windows " + std::string(to_string(a.phase)) +
                          " and " + std::string(to_string(b.phase)) + " overlap");
    }
  }
}

std::optional<double> parse_timestamp(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.find('-', 1) == std::string_view::npos) {
    // Bare epoch seconds.
    std::string s(text);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }
  // YYYY-MM-DD[T ]hh:mm:ss[.frac][Z|+hh:mm|+hhmm|+hh]
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
    return std::nullopt;
  int y = 0;
  unsigned mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), hh) ||
      !parse_int(text.substr(14, 2), mi) || !parse_int(text.substr(17, 2), ss))
    return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) return std::nullopt;
  std::size_t pos = 19;
  double frac = 0.0;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t q = pos + 1;
    while (q < text.size() && std::isdigit(static_cast<unsigned char>(text[q]))) ++q;
    if (q == pos + 1) return std::nullopt;
    frac = std::stod("0" + std::string(text.substr(pos, q - pos)));
    pos = q;
  }
  double offset = 0.0;
  if (pos < text.size()) {
    auto tz = text.substr(pos);
    if (tz == "Z" || tz == "z") {
      offset = 0.0;
    } else if (tz[0] == '+' || tz[0] == '-') {
      auto body = tz.substr(1);
      unsigned oh = 0, om = 0;
      bool ok = false;
      if (body.size() == 2) {
        ok = parse_int(body, oh);
      } else if (body.size() == 4) {
        ok = parse_int(body.substr(0, 2), oh) && parse_int(body.substr(2, 2), om);
      } else if (body.size() == 5 && body[2] == ':') {
        ok = parse_int(body.substr(0, 2), oh) && parse_int(body.substr(3, 2), om);
      }
      if (!ok || oh > 23 || om > 59) return std::nullopt;
      offset = (tz[0] == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
    } else {
      return std::nullopt;
    }
  }
  auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  double secs = static_cast<double>(days_since_epoch) * 86400.0 + hh * 3600.0 + mi * 60.0 +
                ss - offset;
  return secs + frac;
}

std::string format_timestamp(double seconds) {
  using namespace std::chrono;
  double whole = std::floor(seconds);
  auto tp = sys_seconds{std::chrono::seconds{static_cast<long long>(whole)}};
  auto dp = floor<days>(tp);
  year_month_day ymd{dp};
  hh_mm_ss hms{tp - dp};
  double frac = seconds - whole;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  std::string out = buf;
  if (frac > 0.0) {
    char fbuf[16];
    std::snprintf(fbuf, sizeof fbuf, "%.6f", frac);
    std::string f = fbuf + 1;  // drop leading '0'
    while (f.size() > 2 && f.back() == '0') f.pop_back();
    if (f != ".000000" && f != ".") out += f;
  }
  return out + "Z";
}

namespace {

double json_time(const nlohmann::json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (auto t = parse_timestamp(v.get<std::string>())) return *t;
  }
  throw ConfigError("invalid timestamp for " + what + ": " + v.dump());
}

TimeWindow json_window(const nlohmann::json& obj, const std::string& what) {
  if (!obj.is_object() || !obj.contains("start") || !obj.contains("end"))
    throw ConfigError(what + " needs start and end");
  return {json_time(obj["start"], what + ".start"), json_time(obj["end"], what + ".end")};
}

}  // namespace

std::vector<ScenarioLabels> parse_labels(std::string_view json_text, double test_duration) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("label file is not valid JSON: ") + e.what());
  }
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array())
    throw ConfigError("label file needs a 'scenarios' array");
  std::vector<ScenarioLabels> out;
  for (const auto& s : doc["scenarios"]) {
    ScenarioLabels labels;
    if (!s.contains("name") || !s["name"].is_string())
      throw ConfigError("scenario entry without a name");
    labels.name = s["name"].get<std::string>();
    if (find_scenario(out, labels.name) != nullptr)
      throw ConfigError("duplicate scenario '" + labels.name + "'");
    if (!s.contains("data_start") || !s.contains("data_end"))
      throw ConfigError("scenario '" + labels.name + "' needs data_start and data_end");
    labels.data_start = json_time(s["data_start"], labels.name + ".data_start");
    labels.data_end = json_time(s["data_end"], labels.name + ".data_end");
    for (const auto& p : s.value("phases", nlohmann::json::array())) {
      auto name = p.value("phase", std::string());
      auto phase = parse_phase(name);
      if (!phase) throw ConfigError("unknown phase '" + name + "' in " + labels.name);
      labels.phases.push_back({*phase, json_window(p, labels.name + "." + name)});
    }
    if (s.contains("test") && !s["test"].is_null())
      labels.test_override = json_window(s["test"], labels.name + ".test");
    labels.test = derive_default_test_window(labels, test_duration);
    validate(labels);
    out.push_back(std::move(labels));
  }
  return out;
}

std::vector<ScenarioLabels> load_labels(const std::string& path, double test_duration) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open label file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str(), test_duration);
}

const ScenarioLabels* find_scenario(const std::vector<ScenarioLabels>& all,
                                    std::string_view name) {
  for (const auto& s : all)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace alertkit
