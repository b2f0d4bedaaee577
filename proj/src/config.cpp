#include "freefall/config.hpp"

#include <fstream>
#include <istream>
#include <stdexcept>

namespace freefall::config {

namespace {
std::string trimmed(const std::string& raw) {
  const auto begin = raw.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = raw.find_last_not_of(" \t\r\n");
  return raw.substr(begin, end - begin + 1);
}
}  // namespace

Map parse(std::istream& is) {
  Map map;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string entry = trimmed(line);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key=value");
    }
    const std::string key = trimmed(entry.substr(0, eq));
    const std::string value = trimmed(entry.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    }
    map[key] = value;
  }
  return map;
}

Map parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse(in);
}

bool has(const Map& map, const std::string& key) { return map.count(key) > 0; }

double get_double(const Map& map, const std::string& key, double fallback) {
  const auto it = map.find(key);
  if (it == map.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': not a number: " + it->second);
  }
}

int get_int(const Map& map, const std::string& key, int fallback) {
  const auto it = map.find(key);
  if (it == map.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': not an integer: " + it->second);
  }
}

std::string get_string(const Map& map, const std::string& key, const std::string& fallback) {
  const auto it = map.find(key);
  return it == map.end() ? fallback : it->second;
}

}  // namespace freefall::config
