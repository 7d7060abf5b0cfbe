#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pulsefront {

enum class KeyType { Number, Integer, Bool, String, List };

struct KeySpec {
  std::string name;
  KeyType type;
  std::string fallback;
  std::string doc;
};

/// Every key the experiment layer understands, sorted by name.
const std::vector<KeySpec>& config_keys();
const KeySpec* find_key(const std::string& name);

/// Flat `key = value` text. `#` starts a comment, blank lines are ignored,
/// keys are dotted names from config_keys(). Unknown or repeated keys and
/// malformed values raise ConfigError.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  /// Sorted `key = value` lines; parse(serialize()) reproduces the config.
  std::string serialize() const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key) { values_.erase(key); }

  std::string get_string(const std::string& key) const;
  double get_number(const std::string& key) const;
  long long get_integer(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Directory of the file the config was loaded from, for relative CSV paths.
  const std::string& base_dir() const { return base_dir_; }
  void set_base_dir(std::string dir) { base_dir_ = std::move(dir); }

  bool operator==(const Config& o) const { return values_ == o.values_; }

 private:
  std::string raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::string base_dir_;
};

std::vector<std::string> split_list(const std::string& s);
/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

}  // namespace pulsefront
