#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "alertkit/model.hpp"

namespace alertkit {

/// Signature text -> detector abbreviation, first match in declaration order.
class SignatureTable {
 public:
  enum class Match { kExact, kPrefix };

  struct Entry {
    SourceIds ids;
    std::string signature;
    Match match = Match::kExact;
    DetectorId detector;
  };

  SignatureTable() = default;
  explicit SignatureTable(std::vector<Entry> entries);

  /// The bundled table of 93 signatures.
  static const SignatureTable& builtin();
  static SignatureTable parse(std::string_view json_text);
  static SignatureTable load(const std::string& path);

  DetectorId map(SourceIds ids, std::string_view signature) const;

  const std::vector<Entry>& entries() const { return entries_; }
  /// Distinct detector ids reachable through the table, sorted.
  std::vector<DetectorId> detectors() const;
  bool contains(const DetectorId& id) const;

 private:
  std::vector<Entry> entries_;
  // (ids, signature) -> first exact entry index
  std::unordered_map<std::string, std::size_t> exact_;
  std::vector<std::size_t> prefix_;
};

DetectorId map_signature(SourceIds ids, std::string_view signature,
                         const SignatureTable& table = SignatureTable::builtin());

}  // namespace alertkit
