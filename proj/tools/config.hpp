// Flat `key = value` run configuration with command-line overrides. Every
// key a command consumes (from the file, an override, or a default) is
// echoed into output file headers, so each artifact records the complete
// effective configuration of the run that produced it.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sam::cli {

class Config {
 public:
  // Parses an INI-style file ('#' comments, one `key = value` per line).
  // An empty path yields an empty configuration.
  static Config load(const std::string& path);

  // Command-line override: replaces the value in place or appends.
  void override_kv(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_str(const std::string& key, const std::string& def);
  std::string require_str(const std::string& key);
  double get_f64(const std::string& key, double def);
  long get_i64(const std::string& key, long def);
  uint64_t get_u64(const std::string& key, uint64_t def);
  std::vector<double> get_f64_list(const std::string& key,
                                   const std::vector<double>& def);
  // Whitespace-split tokens; empty when the key is absent.
  std::vector<std::string> get_tokens(const std::string& key);

  // File/override pairs in order, then consumed defaults.
  std::vector<std::pair<std::string, std::string>> echo() const;

 private:
  const std::string* find(const std::string& key) const;
  void note_default(const std::string& key, const std::string& value);

  std::vector<std::pair<std::string, std::string>> kv_;
  std::vector<std::pair<std::string, std::string>> defaults_used_;
};

}  // namespace sam::cli
