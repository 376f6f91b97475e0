#pragma once

// Flat key=value parameter sets used by experiments and the command line.

#include <sqbath/error.hpp>

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace sqbath {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Decimal number with optional exponent; also "pi" with an optional factor
/// and divisor ("pi", "-pi", "2*pi", "pi/2", "3*pi/4").
inline double parse_number(std::string_view text, std::string_view key = "value") {
  const std::string_view s = trim(text);
  auto fail = [&]() -> double {
    throw ConfigError("parameter " + std::string(key) + ": cannot parse '" + std::string(s) +
                      "' as a number");
  };
  auto plain = [&](std::string_view t) -> double {
    if (t.empty()) {
      return fail();
    }
    if (t.front() == '+') {
      t.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
      return fail();
    }
    return v;
  };
  const auto at = s.find("pi");
  if (at == std::string_view::npos) {
    return plain(s);
  }
  double factor = 1.0;
  std::string_view head = s.substr(0, at);
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty() && head != "+") {
    if (head.back() != '*') {
      return fail();
    }
    factor = plain(head.substr(0, head.size() - 1));
  }
  double divisor = 1.0;
  std::string_view tail = s.substr(at + 2);
  if (!tail.empty()) {
    if (tail.front() != '/') {
      return fail();
    }
    divisor = plain(tail.substr(1));
    if (divisor == 0.0) {
      return fail();
    }
  }
  return factor * std::numbers::pi / divisor;
}

inline std::vector<double> parse_list(std::string_view text, std::string_view key = "value") {
  std::vector<double> out;
  std::string_view s = trim(text);
  if (s.empty()) {
    throw ConfigError("parameter " + std::string(key) + ": empty list");
  }
  for (;;) {
    const auto comma = s.find(',');
    out.push_back(parse_number(s.substr(0, comma), key));
    if (comma == std::string_view::npos) {
      break;
    }
    s.remove_prefix(comma + 1);
  }
  return out;
}

struct ParamDef {
  std::string key;
  std::string default_value;
  std::string help;
  /// Keys in different nonzero groups are alternative ways of specifying
  /// the same physics and must not be set together.
  int group = 0;
};

/// Resolved parameter values. Keys outside the definition list are rejected.
class Params {
public:
  Params() = default;
  explicit Params(const std::vector<ParamDef>& defs) : defs_(defs) {
    for (const auto& d : defs) {
      values_[d.key] = d.default_value;
    }
  }

  void set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
    it->second = std::string(trim(value));
    explicit_.insert(key);
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] bool is_explicit(const std::string& key) const { return explicit_.count(key) != 0; }
  [[nodiscard]] bool is_set(const std::string& key) const { return !text(key).empty(); }

  [[nodiscard]] const std::string& text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
    return it->second;
  }
  [[nodiscard]] double number(const std::string& key) const { return parse_number(text(key), key); }
  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    return parse_list(text(key), key);
  }
  [[nodiscard]] long integer(const std::string& key) const {
    const std::string& t = text(key);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw ConfigError("parameter " + key + ": cannot parse '" + t + "' as an integer");
    }
    return v;
  }
  [[nodiscard]] bool flag(const std::string& key) const {
    const std::string& t = text(key);
    if (t == "true" || t == "1" || t == "yes") {
      return true;
    }
    if (t == "false" || t == "0" || t == "no") {
      return false;
    }
    throw ConfigError("parameter " + key + ": expected true or false, got '" + t + "'");
  }

  [[nodiscard]] const std::vector<ParamDef>& defs() const { return defs_; }
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  /// Keys needed to reproduce this parameter set: every explicit key, plus
  /// defaults that are not shadowed by an explicit key of another group.
  [[nodiscard]] std::vector<std::string> resolved_keys() const {
    std::set<int> groups;
    for (const auto& d : defs_) {
      if (d.group != 0 && is_explicit(d.key)) {
        groups.insert(d.group);
      }
    }
    std::vector<std::string> out;
    for (const auto& d : defs_) {
      if (is_explicit(d.key)) {
        out.push_back(d.key);
        continue;
      }
      if (values_.at(d.key).empty()) {
        continue;
      }
      bool shadowed = false;
      for (int g : groups) {
        shadowed = shadowed || (d.group != 0 && d.group != g);
      }
      if (!shadowed) {
        out.push_back(d.key);
      }
    }
    return out;
  }

private:
  std::vector<ParamDef> defs_;
  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

} // namespace sqbath
