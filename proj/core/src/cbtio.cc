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

#include "clozekit/cbtio.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "clozekit/error.h"

namespace clozekit {
namespace {

std::vector<std::string> SplitSpaces(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ') ++end;
    if (end > pos) tokens.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

std::vector<std::string_view> SplitOn(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = text.find(sep, pos);
    if (end == std::string_view::npos) {
      parts.push_back(text.substr(pos));
      return parts;
    }
    parts.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
}

void AppendJoined(std::string& out, const std::vector<std::string>& tokens, char sep) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += tokens[i];
  }
}

std::string Format(const ClozeExample& example, bool with_answer) {
  std::string out;
  std::size_t n = 1;
  for (const auto& sentence : example.context) {
    out += std::to_string(n++);
    out.push_back(' ');
    AppendJoined(out, sentence, ' ');
    out.push_back('\n');
  }
  out += std::to_string(n);
  out.push_back(' ');
  AppendJoined(out, example.question, ' ');
  out.push_back('\t');
  if (with_answer) out += example.answer;
  out += "\t\t";
  AppendJoined(out, example.candidates, '|');
  out += "\n\n";
  return out;
}

bool HasSeparator(std::string_view token) {
  return token.find_first_of(" \t\n\r") != std::string_view::npos;
}

std::vector<std::string> WriteProblems(const ClozeExample& example) {
  auto problems = CheckExample(example, 0);
  if (example.context.empty()) problems.push_back("empty context");
  auto bad_token = [](const std::string& t) { return t.empty() || HasSeparator(t); };
  for (const auto& s : example.context) {
    if (std::any_of(s.begin(), s.end(), bad_token)) {
      problems.push_back("context token is empty or contains whitespace");
      break;
    }
  }
  if (std::any_of(example.question.begin(), example.question.end(), bad_token)) {
    problems.push_back("question token is empty or contains whitespace");
  }
  for (const auto& c : example.candidates) {
    if (bad_token(c) || c.find('|') != std::string::npos) {
      problems.push_back("candidate '" + c + "' cannot be written");
    }
  }
  return problems;
}

}  // namespace

WordType InferWordType(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  std::size_t pos = 0;
  while (pos < name.size()) {
    std::size_t end = pos;
    while (end < name.size() && std::isalnum(static_cast<unsigned char>(name[end]))) ++end;
    const std::string_view part(name.data() + pos, end - pos);
    if (part == "NE") return WordType::kNamedEntity;
    if (part == "CN") return WordType::kCommonNoun;
    pos = end + 1;
  }
  return WordType::kOther;
}

CbtReader::CbtReader(std::istream& in, std::string source_name, ReadOptions options)
    : in_(in), source_(std::move(source_name)), options_(options) {}

bool CbtReader::ReadLine(std::string& line) {
  if (!std::getline(in_, line)) return false;
  ++line_no_;
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  at_blank_ = line.empty();
  return true;
}

std::optional<ClozeExample> CbtReader::Next() {
  std::string line;
  do {
    if (!ReadLine(line)) return std::nullopt;
  } while (line.empty());

  const std::size_t example_index = index_++;
  auto parse_error = [&](const std::string& message) {
    return ParseError(source_, line_no_,
                      "example " + std::to_string(example_index) + ": " + message);
  };

  ClozeExample example;
  example.word_type = options_.word_type.value_or(WordType::kOther);
  example.source = {source_, example_index};
  std::size_t expected = 1;
  while (true) {
    if (line.empty()) throw parse_error("unexpected blank line inside example");

    std::size_t number = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), number);
    const std::size_t digits = static_cast<std::size_t>(ptr - line.data());
    if (ec != std::errc() || digits == 0 || (digits < line.size() && line[digits] != ' ')) {
      throw parse_error("line does not start with a sentence number");
    }
    if (number != expected) {
      throw parse_error("sentence number " + std::to_string(number) + ", expected " +
                        std::to_string(expected));
    }
    const std::string_view rest =
        digits < line.size() ? std::string_view(line).substr(digits + 1) : std::string_view();

    if (rest.find('\t') == std::string_view::npos) {
      if (options_.window != 0 && expected > options_.window) {
        throw parse_error("expected question line " + std::to_string(expected) +
                          " with tab-separated answer");
      }
      example.context.push_back(SplitSpaces(rest));
    } else {
      if (options_.window != 0 && expected != options_.window + 1) {
        throw parse_error("question line after " + std::to_string(expected - 1) +
                          " context sentences, expected " + std::to_string(options_.window));
      }
      const auto fields = SplitOn(rest, '\t');
      if (fields.size() != 4 || !fields[2].empty()) {
        throw parse_error(
            "question line must be '<question>\\t<answer>\\t\\t<candidates>'");
      }
      example.question = SplitSpaces(fields[0]);
      example.answer = std::string(fields[1]);
      for (auto c : SplitOn(fields[3], '|')) example.candidates.emplace_back(c);

      auto invalid = [&](const std::string& message) {
        return ValidationError(source_ + ":" + std::to_string(line_no_) + ": example " +
                               std::to_string(example_index) + ": " + message);
      };
      const auto gaps = std::count(example.question.begin(), example.question.end(), kGapTag);
      if (gaps != 1) {
        throw invalid("question has " + std::to_string(gaps) + " gap tags");
      }
      if (options_.require_answer && example.answer.empty()) throw invalid("empty answer");
      if (example.answer.find(' ') != std::string::npos) {
        throw invalid("answer contains a space");
      }
      if (example.candidates.size() != kNumCandidates) {
        throw invalid(std::to_string(example.candidates.size()) + " candidates, expected " +
                      std::to_string(kNumCandidates));
      }
      std::vector<std::string> sorted = example.candidates;
      std::sort(sorted.begin(), sorted.end());
      if (const auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
        throw invalid("candidate '" + *dup + "' repeated");
      }
      if (!example.answer.empty() &&
          std::find(example.candidates.begin(), example.candidates.end(), example.answer) ==
              example.candidates.end()) {
        throw invalid("answer '" + example.answer + "' not among candidates");
      }
      break;
    }
    ++expected;
    if (!ReadLine(line)) throw parse_error("file ends inside an example");
  }

  // Blank separator (optional at end of file).
  if (ReadLine(line) && !line.empty()) {
    throw ParseError(source_, line_no_, "expected blank line after example " +
                                            std::to_string(example_index));
  }
  return example;
}

bool CbtReader::Resync() {
  if (at_blank_) return true;
  std::string line;
  while (ReadLine(line)) {
    if (line.empty()) return true;
  }
  return false;
}

CbtWriter::CbtWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot create " + path.string());
}

void CbtWriter::Write(const ClozeExample& example) {
  const auto problems = WriteProblems(example);
  if (!problems.empty()) {
    throw ValidationError("refusing to write invalid example from " + example.source.book_id +
                          ":" + std::to_string(example.source.sentence_index) + ": " +
                          problems.front());
  }
  out_ << Format(example, true);
  if (!out_) throw IoError("write failed: " + path_.string());
}

void CbtWriter::Close() {
  out_.close();
  if (out_.fail()) throw IoError("cannot finish writing " + path_.string());
}

std::string FormatExample(const ClozeExample& example) { return Format(example, true); }

std::string FormatExampleWithoutAnswer(const ClozeExample& example) {
  return Format(example, false);
}

void WriteExamples(const std::filesystem::path& path,
                   const std::vector<ClozeExample>& examples) {
  CbtWriter writer(path);
  for (const auto& ex : examples) writer.Write(ex);
  writer.Close();
}

std::vector<ClozeExample> ReadExamples(const std::filesystem::path& path,
                                       ReadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (!options.word_type) options.word_type = InferWordType(path);
  CbtReader reader(in, path.string(), options);
  std::vector<ClozeExample> examples;
  while (auto ex = reader.Next()) examples.push_back(std::move(*ex));
  if (in.bad()) throw IoError("read failed: " + path.string());
  return examples;
}

ValidationReport ValidateFile(const std::filesystem::path& path, ReadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (!options.word_type) options.word_type = InferWordType(path);
  CbtReader reader(in, path.string(), options);
  ValidationReport report;
  while (true) {
    try {
      if (!reader.Next()) break;
      ++report.accepted;
    } catch (const ValidationError& e) {
      report.violations.push_back({reader.examples_read() - 1, reader.line(), e.what()});
      if (!reader.Resync()) break;
    }
  }
  return report;
}

}  // namespace clozekit
