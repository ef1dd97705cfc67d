#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "alertkit/ingest.hpp"
#include "alertkit/model.hpp"

namespace alertkit {

// Normalized alert store: newline-delimited JSON, first line is a header
// {"format":"alertkit-alerts","version":1}, then one Alert object per line.

inline constexpr int kStoreVersion = 1;

nlohmann::json to_json(const Alert& alert);
Alert alert_from_json(const nlohmann::json& j);

class AlertWriter {
 public:
  explicit AlertWriter(const std::string& path);
  explicit AlertWriter(std::ostream& out);
  AlertWriter(const AlertWriter&) = delete;
  AlertWriter& operator=(const AlertWriter&) = delete;
  ~AlertWriter();

  void write(const Alert& alert);
  std::size_t count() const { return count_; }

 private:
  std::unique_ptr<std::ostream> owned_;
  std::ostream* out_;
  std::size_t count_ = 0;
};

/// Calls `fn` for every alert in the store. Throws IngestError on a missing or
/// foreign header, or a malformed line.
void read_alerts(const std::string& path, const std::function<void(Alert&&)>& fn);
std::vector<Alert> read_all_alerts(const std::string& path);
void write_alerts(const std::string& path, const std::vector<Alert>& alerts);

std::string serialize_alert(const Alert& alert);

nlohmann::json to_json(const IngestStats& stats);

}  // namespace alertkit
