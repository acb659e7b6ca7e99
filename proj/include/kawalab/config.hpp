#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kawalab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plain-text config of `key = value` lines grouped in `[sections]`.
/// '#' and ';' start comments; whitespace is trimmed.
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto cut = line.find_first_of("#;");
      if (cut != std::string::npos) line.erase(cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value, got '" +
                          line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      cfg.values_[section][key] = value;
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    return s != values_.end() && s->second.count(key) > 0;
  }

  std::string get(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    if (s == values_.end() || !s->second.count(key))
      throw ConfigError(origin_ + ": missing key [" + section + "] " + key);
    return s->second.at(key);
  }

  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    return to_double(section, key, get(section, key));
  }
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
  }
  long get_int(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
      std::size_t pos = 0;
      const long r = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v +
                        "' is not an integer");
    }
  }
  long get_int_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v + "' is not a boolean");
  }

  /// every missing key among `required`, for exhaustive error reports
  std::vector<std::string> missing(
      const std::vector<std::pair<std::string, std::string>>& required) const {
    std::vector<std::string> out;
    for (const auto& [sec, key] : required)
      if (!has(sec, key)) out.push_back("[" + sec + "] " + key);
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  double to_double(const std::string& section, const std::string& key,
                   const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double r = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v +
                        "' is not a number");
    }
  }

  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace kawalab
