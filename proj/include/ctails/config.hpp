#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctails {

// Minimal sectioned key-value config: "[section]" headers, "key = value"
// lines, '#' comments.  Values keep their literal text.
class Config {
 public:
  static Config parse(std::istream& is) {
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
      cfg.values_[section + "." + trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return cfg;
  }
  static Config parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  std::string require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing key '" + key + "'");
    return it->second;
  }

  long long get_int(const std::string& key, long long fallback) const {
    return has(key) ? std::stoll(require(key)) : fallback;
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? std::stod(require(key)) : fallback;
  }
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::istringstream ss(require(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  std::map<std::string, std::string> values_;
};

}  // namespace ctails
