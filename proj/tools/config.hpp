#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace livsic::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyType { u64, real, boolean, text, choice, interval, real_or_random };

struct KeyDef {
  std::string name;
  KeyType type;
  std::string default_value;
  std::vector<std::string> choices;  // for KeyType::choice
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<KeyDef>& schema();

/// Effective settings: schema defaults overlaid by file entries and explicit
/// overrides. Every stored value has been validated against its key type.
class AnalysisConfig {
 public:
  AnalysisConfig();

  /// Flat `key = value` lines; `[section]` prefixes following keys with
  /// "section."; `#` starts a comment. Unknown or repeated keys are errors.
  static AnalysisConfig parse(const std::string& text, const std::string& origin = "<config>");
  static AnalysisConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Replaces the value of a key that was not set explicitly (scenario defaults).
  void apply_default(const std::string& key, const std::string& value);
  bool explicitly_set(const std::string& key) const { return explicit_.count(key) > 0; }

  const std::string& text(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::optional<double> real_or_random(const std::string& key) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

}  // namespace livsic::cli
