#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace sdr {

// Sectioned key-value configuration text. Keys are addressed flat as
// "section.key". '#' or ';' starts a comment; blank lines are skipped;
// surrounding whitespace is trimmed, interior whitespace in values kept.
// Parse errors name the line number.
struct IniFile {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }

  // Typed getters; throwing variants name the missing/invalid key.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key) const;  // true/false/1/0/yes/no/on/off
  bool get_bool_or(const std::string& key, bool fallback) const;
};

IniFile parse_ini(const std::string& text);
IniFile load_ini(const std::filesystem::path& path);

// Deterministic round-trippable rendering: sections and keys in sorted
// order, one "key = value" per line.
std::string serialize_ini(const IniFile& ini);

}  // namespace sdr
