#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace artnav {

struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// `key = value` lines; `#` starts a comment. Keys may repeat.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, std::string source = "<stream>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::vector<KeyValueEntry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }
  std::filesystem::path directory() const;

  /// Last value for a key, if present.
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Throws FormatError for any key outside `known` (exact match or prefix ending in '*').
  void reject_unknown(const std::vector<std::string>& known) const;

  [[noreturn]] void fail(const KeyValueEntry& e, const std::string& msg) const;

 private:
  std::vector<KeyValueEntry> entries_;
  std::string source_;
};

/// Parses whitespace- or comma-separated doubles; all values must be finite.
std::vector<double> parse_doubles(const std::string& text);

}  // namespace artnav
