#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace cck {

/// TOML-style config tree, flattened to "section.key" entries.
/// Supported values: numbers, booleans, quoted strings, and flat arrays of
/// numbers or strings. '#' starts a comment.
class Config {
 public:
  using Value = std::variant<double, bool, std::string, std::vector<double>,
                             std::vector<std::string>>;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string str(const std::string& key, const std::string& fallback = "") const;
  std::vector<double> numbers(const std::string& key,
                              const std::vector<double>& fallback = {}) const;

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }

  /// Hash over the canonical (sorted, normalized) key/value listing, so
  /// formatting-only edits do not change experiment identity.
  std::uint64_t hash() const;
  std::string canonical() const;

  const std::map<std::string, Value>& entries() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

}  // namespace cck
