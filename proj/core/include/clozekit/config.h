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

#ifndef CLOZEKIT_CONFIG_H_
#define CLOZEKIT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace clozekit {

// Line-oriented "key = value" settings. '#' starts a comment line; blank
// lines are ignored; keys may appear once.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  // Throws ParseError on a line without '=' or a repeated key.
  static KeyValueConfig Parse(std::string_view text, const std::string& source = "config");
  static KeyValueConfig Load(const std::filesystem::path& path);

  bool Has(const std::string& key) const { return entries_.count(key) > 0; }
  void Set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Typed getters return `fallback` when the key is absent and throw
  // ValidationError naming the key when the value does not parse.
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::size_t GetSize(const std::string& key, std::size_t fallback) const;
  std::uint64_t GetUint64(const std::string& key, std::uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;

  // Throws ValidationError listing any key not in `known`.
  void RequireKnown(const std::set<std::string>& known) const;

  // Sorted "key=value" lines.
  std::string Serialize() const;

 private:
  std::map<std::string, std::string> entries_;
};

// Shortest decimal text that reads back as the same double.
std::string FormatDouble(double value);

}  // namespace clozekit

#endif  // CLOZEKIT_CONFIG_H_
