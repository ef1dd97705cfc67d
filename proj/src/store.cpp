#include "alertkit/store.hpp"

#include <fstream>
#include <memory>

namespace alertkit {

using nlohmann::json;

namespace {

json header() { return {{"format", "alertkit-alerts"}, {"version", kStoreVersion}}; }

}  // namespace

json to_json(const Alert& a) {
  json j = {
      {"id", a.id},
      {"scenario", a.scenario},
      {"timestamp", a.timestamp},
      {"ids", std::string(to_string(a.ids))},
      {"detector", a.detector.str()},
      {"signature", a.signature},
      {"host", a.host},
      {"attributes", a.attributes},
      {"raw", a.raw},
  };
  if (a.src_ip) j["src_ip"] = *a.src_ip;
  if (a.dst_ip) j["dst_ip"] = *a.dst_ip;
  if (a.src_port) j["src_port"] = *a.src_port;
  if (a.dst_port) j["dst_port"] = *a.dst_port;
  return j;
}

Alert alert_from_json(const json& j) {
  Alert a;
  a.id = j.at("id").get<std::string>();
  a.scenario = j.at("scenario").get<std::string>();
  a.timestamp = j.at("timestamp").get<double>();
  auto ids = parse_source_ids(j.at("ids").get<std::string>());
  if (!ids) throw IngestError("unknown ids in alert store: " + j.at("ids").dump());
  a.ids = *ids;
  a.detector = DetectorId::parse(j.at("detector").get<std::string>());
  a.signature = j.at("signature").get<std::string>();
  a.host = j.at("host").get<std::string>();
  if (j.contains("src_ip")) a.src_ip = j["src_ip"].get<std::string>();
  if (j.contains("dst_ip")) a.dst_ip = j["dst_ip"].get<std::string>();
  if (j.contains("src_port")) a.src_port = j["src_port"].get<int>();
  if (j.contains("dst_port")) a.dst_port = j["dst_port"].get<int>();
  a.attributes = j.at("attributes").get<std::map<std::string, std::string>>();
  a.raw = j.at("raw").get<std::string>();
  return a;
}

std::string serialize_alert(const Alert& alert) { return to_json(alert).dump(); }

AlertWriter::AlertWriter(const std::string& path)
    : owned_(std::make_unique<std::ofstream>(path, std::ios::binary)), out_(owned_.get()) {
  if (!*out_) throw IngestError("cannot write " + path);
  *out_ << header().dump() << '\n';
}

AlertWriter::AlertWriter(std::ostream& out) : out_(&out) { *out_ << header().dump() << '\n'; }

AlertWriter::~AlertWriter() { out_->flush(); }

void AlertWriter::write(const Alert& alert) {
  *out_ << serialize_alert(alert) << '\n';
  ++count_;
}

void read_alerts(const std::string& path, const std::function<void(Alert&&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open alert store " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("alert store " + path + " is empty");
  try {
    auto h = json::parse(line);
    if (h.value("format", "") != "alertkit-alerts" || h.value("version", 0) != kStoreVersion)
      throw IngestError("unsupported alert store header in " + path);
  } catch (const json::exception&) {
    throw IngestError("alert store " + path + " lacks a header line");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      fn(alert_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw IngestError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw IngestError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<Alert> read_all_alerts(const std::string& path) {
  std::vector<Alert> out;
  read_alerts(path, [&](Alert&& a) { out.push_back(std::move(a)); });
  return out;
}

void write_alerts(const std::string& path, const std::vector<Alert>& alerts) {
  AlertWriter w(path);
  for (const auto& a : alerts) w.write(a);
}

json to_json(const IngestStats& stats) {
  json per = json::object();
  for (const auto& [ids, c] : stats.alerts) per[std::string(to_string(ids))] = c;
  return {{"alerts", per},
          {"total", stats.total()},
          {"parse_errors", stats.parse_errors},
          {"unknown_signatures", stats.unknown_signatures},
          {"files", stats.files}};
}

}  // namespace alertkit
