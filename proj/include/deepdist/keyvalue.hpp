#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace deepdist {

// Plain "key = value" text: one entry per line, '#' starts a comment, later
// keys override earlier ones. Keys are case-sensitive.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text);
  static KeyValueFile read(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Whitespace- or comma-separated numbers.
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Whitespace- or comma-separated numbers; throws ConfigError.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace deepdist
