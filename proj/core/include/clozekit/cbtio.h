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

// Children's Book Test example files.
//
// Each example is 20 context lines "N <tokens>" (N = 1..20), a question line
//
//   21 <question tokens>\t<answer>\t\t<cand1>|<cand2>|...|<cand10>
//
// and one blank line. Files are UTF-8 with LF endings. The reader also
// accepts CRLF and trailing spaces.

#ifndef CLOZEKIT_CBTIO_H_
#define CLOZEKIT_CBTIO_H_

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clozekit/clozegen.h"

namespace clozekit {

struct ReadOptions {
  // Number of context lines per example; 0 accepts any count.
  std::size_t window = kDefaultWindow;
  // Word type recorded on each example. When unset, inferred from an "NE" or
  // "CN" component of the file name (e.g. "cbtest_NE_valid_2000ex.txt").
  std::optional<WordType> word_type;
  // When false the answer field may be empty (human-study question files).
  bool require_answer = true;
};

// Word type implied by a file name, kOther when it names neither.
WordType InferWordType(const std::filesystem::path& path);

// Streams examples out of a CBT file. Parse and validation errors carry the
// source name and the 1-based line number.
class CbtReader {
 public:
  CbtReader(std::istream& in, std::string source_name, ReadOptions options = {});

  // Next example, or nullopt at end of input. Throws ParseError.
  std::optional<ClozeExample> Next();

  // Skips to the next blank line after a failed Next(), so the caller can
  // keep going. Returns false at end of input.
  bool Resync();

  std::size_t line() const { return line_no_; }
  std::size_t examples_read() const { return index_; }

 private:
  bool ReadLine(std::string& line);

  std::istream& in_;
  std::string source_;
  ReadOptions options_;
  std::size_t line_no_ = 0;
  std::size_t index_ = 0;
  bool at_blank_ = false;
};

class CbtWriter {
 public:
  // Throws IoError if the file cannot be created.
  explicit CbtWriter(const std::filesystem::path& path);

  // Throws ValidationError if `example` breaks an invariant.
  void Write(const ClozeExample& example);
  // Flushes and closes; throws IoError on failure.
  void Close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Serialization of one example, exactly as written to disk.
std::string FormatExample(const ClozeExample& example);
// Same layout with the answer field left empty.
std::string FormatExampleWithoutAnswer(const ClozeExample& example);

void WriteExamples(const std::filesystem::path& path,
                   const std::vector<ClozeExample>& examples);

std::vector<ClozeExample> ReadExamples(const std::filesystem::path& path,
                                       ReadOptions options = {});

struct FileViolation {
  std::size_t example_index = 0;  // 0-based ordinal within the file
  std::size_t line = 0;
  std::string message;
};

struct ValidationReport {
  std::size_t accepted = 0;
  std::vector<FileViolation> violations;

  bool clean() const { return violations.empty(); }
};

// Reads the whole file, collecting every violation instead of stopping at
// the first. Throws IoError if the file cannot be opened.
ValidationReport ValidateFile(const std::filesystem::path& path, ReadOptions options = {});

}  // namespace clozekit

#endif  // CLOZEKIT_CBTIO_H_
