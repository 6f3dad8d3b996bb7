#include "qropt/ini.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qropt {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

IniFile IniFile::parse(const std::string& text) {
  IniFile ini;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error("ini: malformed section header at line " +
                                 std::to_string(line_no));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("ini: expected key = value at line " +
                               std::to_string(line_no));
    Entry e;
    e.section = section;
    e.key = trim(t.substr(0, eq));
    e.value = trim(t.substr(eq + 1));
    if (e.key.empty())
      throw std::runtime_error("ini: empty key at line " +
                               std::to_string(line_no));
    ini.entries_.push_back(std::move(e));
  }
  return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file)
    throw std::runtime_error("ini: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse(buffer.str());
}

const IniFile::Entry* IniFile::find(std::string_view section,
                                    std::string_view key) const {
  const Entry* found = nullptr;
  for (const Entry& e : entries_)
    if (e.section == section && e.key == key) found = &e;  // last wins
  return found;
}

bool IniFile::has_section(std::string_view section) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.section == section; });
}

bool IniFile::has(std::string_view section, std::string_view key) const {
  return find(section, key) != nullptr;
}

std::string IniFile::get(std::string_view section,
                         std::string_view key) const {
  const Entry* e = find(section, key);
  if (!e)
    throw std::runtime_error("ini: missing key [" + std::string(section) +
                             "] " + std::string(key));
  return e->value;
}

std::string IniFile::get_or(std::string_view section, std::string_view key,
                            std::string_view fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : std::string(fallback);
}

double IniFile::get_double(std::string_view section,
                           std::string_view key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("ini: [" + std::string(section) + "] " +
                           std::string(key) + " is not a number: " + v);
}

double IniFile::get_double_or(std::string_view section, std::string_view key,
                              double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t IniFile::get_int(std::string_view section,
                              std::string_view key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (trim(v.substr(used)).empty()) return i;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("ini: [" + std::string(section) + "] " +
                           std::string(key) + " is not an integer: " + v);
}

std::int64_t IniFile::get_int_or(std::string_view section,
                                 std::string_view key,
                                 std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool IniFile::get_bool_or(std::string_view section, std::string_view key,
                          bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get(section, key);
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw std::runtime_error("ini: [" + std::string(section) + "] " +
                           std::string(key) + " is not a boolean: " + v);
}

std::vector<std::string> IniFile::sections() const {
  std::vector<std::string> out;
  for (const Entry& e : entries_)
    if (std::find(out.begin(), out.end(), e.section) == out.end())
      out.push_back(e.section);
  return out;
}

std::vector<std::string> IniFile::keys(std::string_view section) const {
  std::vector<std::string> out;
  for (const Entry& e : entries_)
    if (e.section == section &&
        std::find(out.begin(), out.end(), e.key) == out.end())
      out.push_back(e.key);
  return out;
}

}  // namespace qropt
