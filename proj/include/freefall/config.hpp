#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace freefall::config {

/// Flat key=value settings, one entry per line; '#' starts a comment.
using Map = std::map<std::string, std::string>;

Map parse(std::istream& is);
Map parse_file(const std::string& path);

bool has(const Map& map, const std::string& key);
double get_double(const Map& map, const std::string& key, double fallback);
int get_int(const Map& map, const std::string& key, int fallback);
std::string get_string(const Map& map, const std::string& key, const std::string& fallback);

}  // namespace freefall::config
