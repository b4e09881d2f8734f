// Copyright 2026 The Clozekit Authors.
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

#include "clozekit/config.h"

#include <charconv>
#include <cmath>

#include "clozekit/error.h"
#include "clozekit/resources.h"

namespace clozekit {
namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::string_view text, const std::string& source) {
  KeyValueConfig config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = Trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=value");
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(source, line_no, "empty key");
    if (!config.entries_.emplace(key, std::string(Trim(line.substr(eq + 1)))).second) {
      throw ParseError(source, line_no, "key '" + key + "' repeated");
    }
  }
  return config;
}

KeyValueConfig KeyValueConfig::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

std::string KeyValueConfig::GetString(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const double v = ParseNumber<double>(key, it->second);
  if (!std::isfinite(v)) throw ValidationError("config key '" + key + "' is not finite");
  return v;
}

std::size_t KeyValueConfig::GetSize(const std::string& key, std::size_t fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : ParseNumber<std::size_t>(key, it->second);
}

std::uint64_t KeyValueConfig::GetUint64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : ParseNumber<std::uint64_t>(key, it->second);
}

bool KeyValueConfig::GetBool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config key '" + key + "': expected true or false, got '" + v + "'");
}

void KeyValueConfig::RequireKnown(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [key, value] : entries_) {
    if (known.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw ValidationError("unknown config keys: " + unknown);
}

std::string KeyValueConfig::Serialize() const {
  std::string out;
  for (const auto& [key, value] : entries_) out += key + "=" + value + "\n";
  return out;
}

std::string FormatDouble(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace clozekit
