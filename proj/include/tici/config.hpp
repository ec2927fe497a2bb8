// Copyright 2026 The tici developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Config-file front end for run_sweep. The format is a small TOML
// subset: exactly one [table] whose name selects the mode, bare
// key = value pairs inside it, '#' comments, and values that are
// numbers, booleans or double-quoted strings. Angle-valued keys take
// either a plain number in radians or a string like "22.5 deg".
// Every violation throws ConfigError naming the offending key, so the
// CLI can map it to a usage error; out-of-range theta_p only warns,
// because the pump angle is periodic.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tici/errors.hpp"
#include "tici/sweep.hpp"

namespace tici {

namespace detail {

struct TomlValue {
  enum class Kind { Number, Integer, String, Boolean };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::int64_t integer = 0;
  bool boolean = false;
  std::string text;
  std::size_t line = 0;
};

using TomlTable = std::map<std::string, TomlValue>;

inline bool valid_bare_name(const std::string& s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

inline std::string trim_ws(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
    ++b;
  }
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
    --e;
  }
  return s.substr(b, e - b);
}

// Drops a trailing '#' comment, honoring double-quoted strings so a
// '#' inside a value survives.
inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

inline TomlValue parse_toml_value(const std::string& raw, std::size_t line) {
  TomlValue v;
  v.line = line;
  if (raw == "true" || raw == "false") {
    v.kind = TomlValue::Kind::Boolean;
    v.boolean = raw == "true";
    return v;
  }
  if (!raw.empty() && raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw ConfigError("line " + std::to_string(line) + ": unterminated string " + raw);
    }
    std::string text;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      const char c = raw[i];
      if (c == '\\') {
        if (i + 2 >= raw.size() || (raw[i + 1] != '"' && raw[i + 1] != '\\')) {
          throw ConfigError("line " + std::to_string(line) +
                            ": only \\\" and \\\\ escapes are supported");
        }
        text += raw[++i];
      } else if (c == '"') {
        throw ConfigError("line " + std::to_string(line) + ": trailing text after string");
      } else {
        text += c;
      }
    }
    v.kind = TomlValue::Kind::String;
    v.text = text;
    return v;
  }
  bool integral = !raw.empty();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    const bool sign_ok = i == 0 && (c == '+' || c == '-');
    if (!std::isdigit(static_cast<unsigned char>(c)) && !sign_ok) {
      integral = false;
      break;
    }
  }
  std::istringstream stream(raw);
  if (integral) {
    std::int64_t parsed = 0;
    if (stream >> parsed && stream.eof()) {
      v.kind = TomlValue::Kind::Integer;
      v.integer = parsed;
      v.number = static_cast<double>(parsed);
      return v;
    }
  } else {
    double parsed = 0.0;
    if (stream >> parsed && stream.eof()) {
      v.kind = TomlValue::Kind::Number;
      v.number = parsed;
      return v;
    }
  }
  throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + raw + "'");
}

inline std::map<std::string, TomlTable> parse_toml(const std::string& text) {
  std::map<std::string, TomlTable> doc;
  std::string current;
  std::istringstream stream(text);
  std::string raw_line;
  std::size_t lineno = 0;
  while (std::getline(stream, raw_line)) {
    ++lineno;
    const std::string line = trim_ws(strip_comment(raw_line));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed table header " + line);
      }
      const std::string name = trim_ws(line.substr(1, line.size() - 2));
      if (!valid_bare_name(name)) {
        throw ConfigError("line " + std::to_string(lineno) + ": invalid table name '" + name +
                          "'");
      }
      if (doc.count(name) != 0) {
        throw ConfigError("line " + std::to_string(lineno) + ": duplicate table [" + name + "]");
      }
      doc[name];
      current = name;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" +
                        line + "'");
    }
    const std::string key = trim_ws(line.substr(0, eq));
    if (!valid_bare_name(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": invalid key '" + key + "'");
    }
    if (current.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                        "' appears outside a mode table");
    }
    TomlTable& table = doc[current];
    if (table.count(key) != 0) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in [" +
                        current + "]");
    }
    table[key] = parse_toml_value(trim_ws(line.substr(eq + 1)), lineno);
  }
  return doc;
}

inline double config_number(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::Number && v.kind != TomlValue::Kind::Integer) {
    throw ConfigError("'" + key + "' must be a number");
  }
  return v.number;
}

inline std::int64_t config_integer(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::Integer) {
    throw ConfigError("'" + key + "' must be an integer");
  }
  return v.integer;
}

inline bool config_boolean(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::Boolean) {
    throw ConfigError("'" + key + "' must be true or false");
  }
  return v.boolean;
}

inline std::string config_string(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::String) {
    throw ConfigError("'" + key + "' must be a quoted string");
  }
  return v.text;
}

// Angles are radians by default; a string value must end in "deg" and
// is converted on the spot.
inline double config_angle(const TomlValue& v, const std::string& key) {
  if (v.kind == TomlValue::Kind::Number || v.kind == TomlValue::Kind::Integer) {
    return v.number;
  }
  if (v.kind == TomlValue::Kind::String) {
    std::string body = trim_ws(v.text);
    if (body.size() > 3 && body.compare(body.size() - 3, 3, "deg") == 0) {
      body = trim_ws(body.substr(0, body.size() - 3));
      std::istringstream stream(body);
      double degrees = 0.0;
      if (stream >> degrees && stream.eof()) {
        return degrees * std::numbers::pi / 180.0;
      }
    }
  }
  throw ConfigError("'" + key + "' must be a number in radians or a string like \"22.5 deg\"");
}

inline std::uint64_t config_seed(const TomlValue& v, const std::string& key) {
  const std::int64_t s = config_integer(v, key);
  if (s < 0) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(s);
}

inline void apply_common_key(SweepSpec& spec, const std::string& key, const TomlValue& v,
                             bool* handled) {
  *handled = true;
  if (key == "base") {
    spec.base = config_number(v, key);
    if (!(spec.base > 1.0)) {
      throw ConfigError("base must exceed 1, got " + format_number(spec.base));
    }
  } else if (key == "seed") {
    spec.seed = config_seed(v, key);
  } else if (key == "out") {
    spec.out_path = config_string(v, key);
  } else if (key == "format") {
    const std::string f = config_string(v, key);
    if (f == "csv") {
      spec.format = OutputFormat::Csv;
    } else if (f == "json") {
      spec.format = OutputFormat::Json;
    } else {
      throw ConfigError("format must be csv or json, got '" + f + "'");
    }
  } else {
    *handled = false;
  }
}

inline void apply_optical_key(SweepSpec& spec, const std::string& key, const TomlValue& v,
                              bool* handled) {
  *handled = true;
  if (key == "counts") {
    const std::int64_t n = config_integer(v, key);
    if (n < 1) {
      throw ConfigError("counts must be at least 1, got " + std::to_string(n));
    }
    spec.counts_per_setting = static_cast<std::uint64_t>(n);
  } else if (key == "theta_b") {
    spec.theta_b = config_angle(v, key);
  } else if (key == "spdc_phase") {
    spec.spdc_phase = config_angle(v, key);
  } else if (key == "half_angle") {
    spec.half_angle_map = config_boolean(v, key);
  } else {
    *handled = false;
  }
}

inline void apply_range_key(SweepSpec& spec, const std::string& key, const TomlValue& v,
                            bool* handled) {
  *handled = true;
  if (key == "start") {
    spec.start = config_angle(v, key);
  } else if (key == "stop") {
    spec.stop = config_angle(v, key);
  } else if (key == "steps") {
    const std::int64_t n = config_integer(v, key);
    if (n < 2) {
      throw ConfigError("steps must be at least 2, got " + std::to_string(n));
    }
    spec.steps = static_cast<std::size_t>(n);
  } else {
    *handled = false;
  }
}

inline void check_range_order(const SweepSpec& spec) {
  if (!(spec.stop > spec.start)) {
    throw ConfigError("stop must exceed start, got start = " + format_number(spec.start) +
                      ", stop = " + format_number(spec.stop));
  }
}

inline void warn_theta_p_window(SweepSpec& spec, double lo, double hi) {
  if (lo < -1e-12 || hi > std::numbers::pi / 2.0 + 1e-12) {
    spec.warnings.push_back(
        "theta_p outside [0, pi/2]; the mixing parameter is periodic in the pump angle, so the "
        "window repeats");
  }
}

}  // namespace detail

// Parses a config file and returns the fully validated run
// description. Exactly one mode table must be present; unknown tables
// and unknown keys are rejected, defaults are base 2, seed 0 and
// exact-only evaluation (no counts).
inline SweepSpec validate_config(const std::string& text) {
  const auto doc = detail::parse_toml(text);
  if (doc.size() != 1) {
    throw ConfigError(
        "config must contain exactly one mode table ([fig3], [fig4], [single], [max-search] or "
        "[classical-check]); found " +
        std::to_string(doc.size()));
  }
  const std::string& mode = doc.begin()->first;
  const detail::TomlTable& table = doc.begin()->second;
  SweepSpec spec;
  if (mode == "fig3") {
    spec.mode = SweepMode::Fig3;
    for (const auto& [key, value] : table) {
      bool handled = false;
      detail::apply_common_key(spec, key, value, &handled);
      if (!handled) {
        detail::apply_optical_key(spec, key, value, &handled);
      }
      if (!handled) {
        detail::apply_range_key(spec, key, value, &handled);
      }
      if (!handled && key == "axis") {
        const std::string a = detail::config_string(value, key);
        if (a != "x" && a != "y" && a != "z") {
          throw ConfigError("axis must be one of x, y, z; got '" + a + "'");
        }
        spec.axis = a[0];
        handled = true;
      }
      if (!handled && key == "theta_a") {
        spec.theta_a = detail::config_angle(value, key);
        handled = true;
      }
      if (!handled) {
        throw ConfigError("unknown key '" + key + "' in [fig3]");
      }
    }
    detail::check_range_order(spec);
    detail::warn_theta_p_window(spec, spec.start, spec.stop);
  } else if (mode == "fig4") {
    spec.mode = SweepMode::Fig4;
    for (const auto& [key, value] : table) {
      bool handled = false;
      detail::apply_common_key(spec, key, value, &handled);
      if (!handled) {
        detail::apply_optical_key(spec, key, value, &handled);
      }
      if (!handled) {
        detail::apply_range_key(spec, key, value, &handled);
      }
      if (!handled && key == "p") {
        spec.p_value = detail::config_number(value, key);
        if (spec.p_value < 0.0 || spec.p_value > 2.0) {
          throw ConfigError("p = " + detail::format_number(spec.p_value) +
                            " out of range; p ∈ [0,2]");
        }
        handled = true;
      }
      if (!handled) {
        throw ConfigError("unknown key '" + key + "' in [fig4]");
      }
    }
    detail::check_range_order(spec);
  } else if (mode == "single") {
    spec.mode = SweepMode::Single;
    for (const auto& [key, value] : table) {
      bool handled = false;
      detail::apply_common_key(spec, key, value, &handled);
      if (!handled) {
        detail::apply_optical_key(spec, key, value, &handled);
      }
      if (!handled) {
        if (key == "theta_p") {
          spec.theta_p = detail::config_angle(value, key);
        } else if (key == "theta1") {
          spec.theta1 = detail::config_angle(value, key);
        } else if (key == "phi1") {
          spec.phi1 = detail::config_angle(value, key);
        } else if (key == "theta_a") {
          spec.theta_a = detail::config_angle(value, key);
        } else {
          throw ConfigError("unknown key '" + key + "' in [single]");
        }
      }
    }
    detail::warn_theta_p_window(spec, spec.theta_p, spec.theta_p);
  } else if (mode == "max-search") {
    spec.mode = SweepMode::MaxSearch;
    for (const auto& [key, value] : table) {
      bool handled = false;
      detail::apply_common_key(spec, key, value, &handled);
      if (!handled) {
        if (key == "samples") {
          const std::int64_t n = detail::config_integer(value, key);
          if (n < 1) {
            throw ConfigError("samples must be at least 1, got " + std::to_string(n));
          }
          spec.samples = static_cast<std::size_t>(n);
        } else if (key == "dim") {
          const std::int64_t d = detail::config_integer(value, key);
          if (d < 2 || d > 8) {
            throw ConfigError("dim = " + std::to_string(d) + " out of range; dim ∈ [2,8]");
          }
          spec.dim = static_cast<Eigen::Index>(d);
        } else {
          throw ConfigError("unknown key '" + key + "' in [max-search]");
        }
      }
    }
  } else if (mode == "classical-check") {
    spec.mode = SweepMode::ClassicalCheck;
    for (const auto& [key, value] : table) {
      bool handled = false;
      detail::apply_common_key(spec, key, value, &handled);
      if (!handled) {
        if (key == "tables") {
          const std::int64_t n = detail::config_integer(value, key);
          if (n < 1) {
            throw ConfigError("tables must be at least 1, got " + std::to_string(n));
          }
          spec.tables = static_cast<std::size_t>(n);
        } else {
          throw ConfigError("unknown key '" + key + "' in [classical-check]");
        }
      }
    }
  } else {
    throw ConfigError("unknown mode table [" + mode +
                      "]; expected fig3, fig4, single, max-search or classical-check");
  }
  return spec;
}

}  // namespace tici
