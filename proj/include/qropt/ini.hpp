#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qropt {

// Flat key-value config format shared by manifests, topologies and baseline
// tables: [section] headers, key = value lines, full-line # or ; comments.
class IniFile {
 public:
  static IniFile parse(const std::string& text);
  static IniFile load(const std::filesystem::path& path);

  bool has_section(std::string_view section) const;
  bool has(std::string_view section, std::string_view key) const;

  std::string get(std::string_view section, std::string_view key) const;
  std::string get_or(std::string_view section, std::string_view key,
                     std::string_view fallback) const;

  double get_double(std::string_view section, std::string_view key) const;
  double get_double_or(std::string_view section, std::string_view key,
                       double fallback) const;
  std::int64_t get_int(std::string_view section, std::string_view key) const;
  std::int64_t get_int_or(std::string_view section, std::string_view key,
                          std::int64_t fallback) const;
  bool get_bool_or(std::string_view section, std::string_view key,
                   bool fallback) const;

  // Section names in first-appearance order.
  std::vector<std::string> sections() const;
  // Keys of one section in file order.
  std::vector<std::string> keys(std::string_view section) const;

 private:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
  };
  const Entry* find(std::string_view section, std::string_view key) const;
  std::vector<Entry> entries_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace qropt
