#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alertkit/model.hpp"
#include "alertkit/taxonomy.hpp"

namespace alertkit {

struct DialectRecord {
  SourceIds dialect;
  std::size_t line_number = 0;
  std::string text;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line_number_(line_number) {}
  std::size_t line_number() const { return line_number_; }

 private:
  std::size_t line_number_;
};

/// Unreadable inputs and other failures that abort ingestion.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which JSON fields carry each Alert property for one dialect. Every list is
/// a set of dotted paths tried in order; the first present one wins.
struct FieldSpec {
  std::vector<std::string> timestamp;
  std::vector<std::string> host;
  std::vector<std::string> signature;
  std::vector<std::string> src_ip;
  std::vector<std::string> dst_ip;
  std::vector<std::string> src_port;
  std::vector<std::string> dst_port;
  std::vector<std::string> attributes;
};

class DialectManifest {
 public:
  static const DialectManifest& builtin();
  static DialectManifest parse(std::string_view json_text);
  static DialectManifest load(const std::string& path);

  const FieldSpec& fields(SourceIds ids) const { return specs_.at(ids); }

 private:
  std::map<SourceIds, FieldSpec> specs_;
};

/// Where a record came from; fills Alert.id, Alert.scenario and the host when
/// the record itself names none.
struct RecordOrigin {
  std::string scenario;
  std::string host;
  std::string file_id;
};

/// Throws ParseError for malformed JSON, a missing/invalid timestamp or a
/// missing signature. Unknown signatures yield detector "unknown".
Alert parse_record(const DialectRecord& rec, const SignatureTable& table,
                   const DialectManifest& manifest = DialectManifest::builtin(),
                   const RecordOrigin& origin = {});

struct IngestStats {
  std::map<SourceIds, std::size_t> alerts;  // per dialect, successfully parsed
  std::size_t parse_errors = 0;
  std::size_t unknown_signatures = 0;
  std::size_t files = 0;

  std::size_t total() const;
  IngestStats& operator+=(const IngestStats& o);
  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct IngestOptions {
  unsigned jobs = 1;
  std::size_t chunk_lines = 4096;
  /// Receives one message per skipped line and per ignored directory entry.
  std::function<void(const std::string&)> warn;
};

using AlertSink = std::function<void(Alert&&)>;

/// Streams the alerts of root/<scenario>/<ids>/<host-file> into `sink` in
/// file order (files sorted lexicographically by "<ids>/<file>"). Plain and
/// gzip files are both accepted. Bad lines are counted and skipped;
/// unreadable files throw IngestError. Output order does not depend on jobs.
IngestStats load_scenario(const std::string& root, const std::string& scenario,
                          const SignatureTable& table, const AlertSink& sink,
                          const IngestOptions& options = {},
                          const DialectManifest& manifest = DialectManifest::builtin());

/// Scenario directory names under root, sorted.
std::vector<std::string> list_scenarios(const std::string& root);

using ScenarioCounts = std::map<std::string, std::map<SourceIds, std::size_t>>;
ScenarioCounts count_by_scenario(std::span<const Alert> alerts);

/// Host name implied by an alert file name ("intranet_server.json.gz" ->
/// "intranet_server").
std::string host_from_filename(std::string_view filename);

}  // namespace alertkit
