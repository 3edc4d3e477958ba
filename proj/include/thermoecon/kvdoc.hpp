#pragma once

// Flat key=value documents: one pair per line, '#' starts a comment line.
// Numbers are written in shortest round-trip form.

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "thermoecon/error.hpp"

namespace thermoecon {

inline std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

inline double parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

/// Insertion-ordered; later set() calls on an existing key overwrite in place.
class KvDoc {
 public:
  void set(std::string key, std::string value) {
    for (auto& [k, v] : items_) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    items_.emplace_back(std::move(key), std::move(value));
  }
  void set(std::string key, double value) { set(std::move(key), format_number(value)); }
  void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }
  void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }
  void set(std::string key, long long value) { set(std::move(key), std::to_string(value)); }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : items_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  double number(std::string_view key) const {
    auto v = get(key);
    if (!v) throw Error(ErrorCode::Parse, "missing key '" + std::string(key) + "'");
    return parse_number(*v);
  }

  const std::vector<std::pair<std::string, std::string>>& items() const noexcept { return items_; }

  static KvDoc parse(std::istream& in) {
    KvDoc doc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view s = line;
      while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      if (s.empty() || s.front() == '#') continue;
      auto eq = s.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected key=value");
      }
      auto key = s.substr(0, eq);
      while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
      auto value = s.substr(eq + 1);
      while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.remove_prefix(1);
      doc.set(std::string(key), std::string(value));
    }
    return doc;
  }

  friend std::ostream& operator<<(std::ostream& os, const KvDoc& doc) {
    for (const auto& [k, v] : doc.items_) os << k << '=' << v << '\n';
    return os;
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace thermoecon
