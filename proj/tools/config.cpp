#include "config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sam::cli {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string join_f64(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

double parse_f64(const std::string& key, const std::string& v) {
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  }
  if (trim(v.substr(used)).size())
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  return x;
}

}  // namespace

Config Config::load(const std::string& path) {
  Config cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty key");
    cfg.override_kv(key, value);
  }
  return cfg;
}

void Config::override_kv(const std::string& key, const std::string& value) {
  for (auto& [k, v] : kv_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  kv_.emplace_back(key, value);
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

const std::string* Config::find(const std::string& key) const {
  for (const auto& [k, v] : kv_)
    if (k == key) return &v;
  return nullptr;
}

void Config::note_default(const std::string& key, const std::string& value) {
  for (auto& [k, v] : defaults_used_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  defaults_used_.emplace_back(key, value);
}

std::string Config::get_str(const std::string& key, const std::string& def) {
  if (const std::string* v = find(key)) return *v;
  note_default(key, def);
  return def;
}

std::string Config::require_str(const std::string& key) {
  if (const std::string* v = find(key)) return *v;
  throw std::invalid_argument("missing required config key: " + key);
}

double Config::get_f64(const std::string& key, double def) {
  if (const std::string* v = find(key)) return parse_f64(key, *v);
  note_default(key, join_f64({def}));
  return def;
}

long Config::get_i64(const std::string& key, long def) {
  if (const std::string* v = find(key)) {
    double x = parse_f64(key, *v);
    long n = static_cast<long>(x);
    if (static_cast<double>(n) != x)
      throw std::invalid_argument("config key '" + key + "': not an integer");
    return n;
  }
  note_default(key, std::to_string(def));
  return def;
}

uint64_t Config::get_u64(const std::string& key, uint64_t def) {
  if (const std::string* v = find(key)) {
    try {
      size_t used = 0;
      uint64_t x = std::stoull(*v, &used);
      if (trim(v->substr(used)).size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key +
                                  "': bad unsigned integer '" + *v + "'");
    }
  }
  note_default(key, std::to_string(def));
  return def;
}

std::vector<double> Config::get_f64_list(const std::string& key,
                                         const std::vector<double>& def) {
  if (const std::string* v = find(key)) {
    std::vector<double> out;
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) out.push_back(parse_f64(key, tok));
    if (out.empty())
      throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
  }
  note_default(key, join_f64(def));
  return def;
}

std::vector<std::string> Config::get_tokens(const std::string& key) {
  std::vector<std::string> out;
  if (const std::string* v = find(key)) {
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) out.push_back(tok);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Config::echo() const {
  std::vector<std::pair<std::string, std::string>> out = kv_;
  out.insert(out.end(), defaults_used_.begin(), defaults_used_.end());
  return out;
}

}  // namespace sam::cli
