#include "sdr/ini.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdr {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw std::invalid_argument("ini: line " + std::to_string(line) + ": " + what);
}

}  // namespace

const std::string& IniFile::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw std::invalid_argument("ini: missing key '" + key + "'");
  return it->second;
}

std::string IniFile::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

int IniFile::get_int(const std::string& key) const {
  const std::string& raw = get(key);
  try {
    std::size_t used = 0;
    const int v = std::stoi(raw, &used);
    if (used != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("ini: key '" + key + "' is not an integer: '" + raw + "'");
  }
}

int IniFile::get_int_or(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double IniFile::get_double(const std::string& key) const {
  const std::string& raw = get(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("ini: key '" + key + "' is not a number: '" + raw + "'");
  }
}

double IniFile::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool IniFile::get_bool(const std::string& key) const {
  std::string raw = get(key);
  for (char& c : raw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw std::invalid_argument("ini: key '" + key + "' is not a boolean: '" + raw + "'");
}

bool IniFile::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

IniFile parse_ini(const std::string& text) {
  IniFile out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;

    if (stripped.front() == '[') {
      if (stripped.back() != ']') fail_line(line_no, "unterminated section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty()) fail_line(line_no, "empty section name");
      if (section.find('.') != std::string::npos) {
        fail_line(line_no, "section name must not contain '.'");
      }
      continue;
    }

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail_line(line_no, "expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail_line(line_no, "empty key");
    if (section.empty()) fail_line(line_no, "key '" + key + "' appears before any [section]");
    const std::string full = section + "." + key;
    if (out.values.count(full) != 0) fail_line(line_no, "duplicate key '" + full + "'");
    out.values.emplace(full, value);
  }
  return out;
}

IniFile load_ini(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ini: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ini(buffer.str());
}

std::string serialize_ini(const IniFile& ini) {
  std::ostringstream out;
  std::string current;
  bool first = true;
  for (const auto& [full, value] : ini.values) {  // std::map: already sorted
    const std::size_t dot = full.find('.');
    const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
    const std::string key = dot == std::string::npos ? full : full.substr(dot + 1);
    if (section != current || first) {
      if (!first) out << '\n';
      out << '[' << section << "]\n";
      current = section;
      first = false;
    }
    out << key << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace sdr
