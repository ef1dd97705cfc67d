#include "alertkit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "alertkit/resources.hpp"

namespace alertkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json* find_path(const json& doc, std::string_view path) {
  const json* cur = &doc;
  while (!path.empty()) {
    auto dot = path.find('.');
    auto key = path.substr(0, dot);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
  }
  return cur->is_null() ? nullptr : cur;
}

const json* first_present(const json& doc, const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    const json* v = find_path(doc, p);
    if (v == nullptr) continue;
    if (v->is_array()) {
      if (v->empty() || (*v)[0].is_null()) continue;
      return &(*v)[0];
    }
    return v;
  }
  return nullptr;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += scalar_text(e);
    }
    return out;
  }
  return v.dump();
}

std::optional<std::string> text_field(const json& doc, const std::vector<std::string>& paths) {
  const json* v = first_present(doc, paths);
  if (v == nullptr) return std::nullopt;
  auto s = scalar_text(*v);
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<int> port_field(const json& doc, const std::vector<std::string>& paths) {
  const json* v = first_present(doc, paths);
  if (v == nullptr) return std::nullopt;
  if (v->is_number_integer() || v->is_number_unsigned()) {
    auto p = v->get<long long>();
    if (p >= 0 && p <= 65535) return static_cast<int>(p);
    return std::nullopt;
  }
  if (v->is_string()) {
    const auto& s = v->get_ref<const std::string&>();
    int p = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), p);
    if (ec == std::errc() && end == s.data() + s.size() && p >= 0 && p <= 65535) return p;
  }
  return std::nullopt;
}

std::vector<std::string> string_list(const json& obj, const char* key) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) throw ConfigError(std::string("manifest field '") + key + "' must be a list");
  for (const auto& v : obj[key]) out.push_back(v.get<std::string>());
  return out;
}

/// Line reader over plain or gzip files (zlib reads both transparently).
class LineReader {
 public:
  explicit LineReader(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw IngestError("cannot open " + path);
    gzbuffer(file_, 1 << 17);
    path_ = path;
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;
  ~LineReader() {
    if (file_ != nullptr) gzclose(file_);
  }

  bool next(std::string& line) {
    line.clear();
    char buf[8192];
    bool any = false;
    while (gzgets(file_, buf, sizeof buf) != nullptr) {
      any = true;
      std::size_t n = std::char_traits<char>::length(buf);
      if (n > 0 && buf[n - 1] == '\n') {
        line.append(buf, n - 1);
        return true;
      }
      line.append(buf, n);
    }
    int err = 0;
    const char* msg = gzerror(file_, &err);
    if (err != Z_OK && err != Z_STREAM_END) throw IngestError("read error in " + path_ + ": " + msg);
    return any;
  }

 private:
  gzFile file_;
  std::string path_;
};

struct Chunk {
  SourceIds dialect;
  RecordOrigin origin;
  std::size_t first_line = 1;
  std::vector<std::string> lines;
};

struct ChunkResult {
  std::vector<Alert> alerts;
  std::vector<std::string> errors;
  std::size_t unknown = 0;
};

ChunkResult parse_chunk(const Chunk& chunk, const SignatureTable& table,
                        const DialectManifest& manifest) {
  ChunkResult out;
  out.alerts.reserve(chunk.lines.size());
  for (std::size_t i = 0; i < chunk.lines.size(); ++i) {
    const auto& text = chunk.lines[i];
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    DialectRecord rec{chunk.dialect, chunk.first_line + i, text};
    try {
      auto alert = parse_record(rec, table, manifest, chunk.origin);
      if (alert.detector.is_unknown()) ++out.unknown;
      out.alerts.push_back(std::move(alert));
    } catch (const ParseError& e) {
      out.errors.push_back(chunk.origin.file_id + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

const DialectManifest& DialectManifest::builtin() {
  static const DialectManifest manifest = parse(resources::dialects_json());
  return manifest;
}

DialectManifest DialectManifest::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dialect manifest is not valid JSON: ") + e.what());
  }
  if (!doc.contains("dialects") || !doc["dialects"].is_object())
    throw ConfigError("dialect manifest needs a 'dialects' object");
  DialectManifest m;
  for (auto ids : kAllSources) {
    auto name = std::string(to_string(ids));
    if (!doc["dialects"].contains(name)) throw ConfigError("dialect manifest lacks " + name);
    const auto& d = doc["dialects"][name];
    FieldSpec spec{string_list(d, "timestamp"), string_list(d, "host"),
                   string_list(d, "signature"), string_list(d, "src_ip"),
                   string_list(d, "dst_ip"),    string_list(d, "src_port"),
                   string_list(d, "dst_port"),  string_list(d, "attributes")};
    if (spec.timestamp.empty() || spec.signature.empty())
      throw ConfigError("dialect " + name + " needs timestamp and signature fields");
    m.specs_.emplace(ids, std::move(spec));
  }
  return m;
}

DialectManifest DialectManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dialect manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Alert parse_record(const DialectRecord& rec, const SignatureTable& table,
                   const DialectManifest& manifest, const RecordOrigin& origin) {
  json doc;
  try {
    doc = json::parse(rec.text);
  } catch (const json::exception&) {
    throw ParseError(rec.line_number, "malformed JSON record");
  }
  if (!doc.is_object()) throw ParseError(rec.line_number, "record is not a JSON object");
  const auto& spec = manifest.fields(rec.dialect);

  Alert a;
  const json* ts = first_present(doc, spec.timestamp);
  if (ts == nullptr) throw ParseError(rec.line_number, "missing timestamp");
  if (ts->is_array()) {
    // AMiner lists the timestamps of all involved log lines; the first counts.
    if (ts->empty()) throw ParseError(rec.line_number, "empty timestamp list");
    ts = &(*ts)[0];
  }
  if (ts->is_number()) {
    a.timestamp = ts->get<double>();
  } else if (ts->is_string()) {
    auto t = parse_timestamp(ts->get_ref<const std::string&>());
    if (!t) throw ParseError(rec.line_number, "unparseable timestamp " + ts->dump());
    a.timestamp = *t;
  } else {
    throw ParseError(rec.line_number, "invalid timestamp " + ts->dump());
  }
  if (!std::isfinite(a.timestamp)) throw ParseError(rec.line_number, "non-finite timestamp");

  auto signature = text_field(doc, spec.signature);
  if (!signature) throw ParseError(rec.line_number, "missing signature");
  a.signature = std::move(*signature);
  a.ids = rec.dialect;
  a.detector = table.map(rec.dialect, a.signature);
  a.scenario = origin.scenario;
  a.host = text_field(doc, spec.host).value_or(origin.host);
  a.src_ip = text_field(doc, spec.src_ip);
  a.dst_ip = text_field(doc, spec.dst_ip);
  a.src_port = port_field(doc, spec.src_port);
  a.dst_port = port_field(doc, spec.dst_port);
  for (const auto& path : spec.attributes) {
    const json* v = find_path(doc, path);
    if (v != nullptr) a.attributes.emplace(path, scalar_text(*v));
  }
  a.id = (origin.file_id.empty() ? std::string(to_string(rec.dialect)) : origin.file_id) + ":" +
         std::to_string(rec.line_number);
  a.raw = rec.text;
  return a;
}

std::size_t IngestStats::total() const {
  std::size_t n = 0;
  for (const auto& [ids, c] : alerts) n += c;
  return n;
}

IngestStats& IngestStats::operator+=(const IngestStats& o) {
  for (const auto& [ids, c] : o.alerts) alerts[ids] += c;
  parse_errors += o.parse_errors;
  unknown_signatures += o.unknown_signatures;
  files += o.files;
  return *this;
}

std::string host_from_filename(std::string_view filename) {
  std::string name(filename);
  for (std::string_view ext : {".gz", ".json", ".jsonl", ".ndjson", ".log", ".txt"}) {
    if (name.size() > ext.size() && std::string_view(name).ends_with(ext))
      name.resize(name.size() - ext.size());
  }
  return name;
}

std::vector<std::string> list_scenarios(const std::string& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IngestError("input root is not a directory: " + root);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

IngestStats load_scenario(const std::string& root, const std::string& scenario,
                          const SignatureTable& table, const AlertSink& sink,
                          const IngestOptions& options, const DialectManifest& manifest) {
  auto warn = [&](const std::string& msg) {
    if (options.warn) options.warn(msg);
  };
  fs::path dir = fs::path(root) / scenario;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IngestError("scenario directory missing: " + dir.string());

  struct FileJob {
    std::string rel;
    fs::path path;
    SourceIds ids;
  };
  std::vector<FileJob> files;
  for (const auto& ids_dir : fs::directory_iterator(dir)) {
    auto name = ids_dir.path().filename().string();
    auto ids = parse_source_ids(name);
    if (!ids_dir.is_directory() || !ids) {
      warn("ignoring " + ids_dir.path().string() + ": not an IDS directory");
      continue;
    }
    for (const auto& f : fs::directory_iterator(ids_dir.path())) {
      if (!f.is_regular_file()) continue;
      files.push_back({name + "/" + f.path().filename().string(), f.path(), *ids});
    }
  }
  std::sort(files.begin(), files.end(),
            [](const FileJob& a, const FileJob& b) { return a.rel < b.rel; });

  IngestStats stats;
  auto absorb = [&](ChunkResult&& r, SourceIds ids) {
    for (const auto& e : r.errors) warn(e);
    stats.parse_errors += r.errors.size();
    stats.unknown_signatures += r.unknown;
    stats.alerts[ids] += r.alerts.size();
    for (auto& a : r.alerts) sink(std::move(a));
  };

  const unsigned jobs = std::max(1u, options.jobs);
  const std::size_t chunk_lines = std::max<std::size_t>(1, options.chunk_lines);
  std::deque<std::pair<std::future<ChunkResult>, SourceIds>> inflight;
  auto drain_one = [&] {
    auto [fut, ids] = std::move(inflight.front());
    inflight.pop_front();
    absorb(fut.get(), ids);
  };

  for (const auto& job : files) {
    ++stats.files;
    stats.alerts.try_emplace(job.ids, 0);
    LineReader reader(job.path.string());
    RecordOrigin origin{scenario, host_from_filename(job.path.filename().string()),
                        scenario + "/" + job.rel};
    std::size_t line_no = 1;
    std::string line;
    bool more = true;
    while (more) {
      Chunk chunk{job.ids, origin, line_no, {}};
      chunk.lines.reserve(chunk_lines);
      while (chunk.lines.size() < chunk_lines && (more = reader.next(line)))
        chunk.lines.push_back(std::move(line));
      line_no += chunk.lines.size();
      if (chunk.lines.empty()) break;
      if (jobs == 1) {
        absorb(parse_chunk(chunk, table, manifest), job.ids);
        continue;
      }
      if (inflight.size() >= jobs) drain_one();
      inflight.emplace_back(std::async(std::launch::async,
                                       [&table, &manifest, c = std::move(chunk)] {
                                         return parse_chunk(c, table, manifest);
                                       }),
                            job.ids);
    }
  }
  while (!inflight.empty()) drain_one();
  return stats;
}

ScenarioCounts count_by_scenario(std::span<const Alert> alerts) {
  ScenarioCounts out;
  for (const auto& a : alerts) ++out[a.scenario][a.ids];
  return out;
}

}  // namespace alertkit
