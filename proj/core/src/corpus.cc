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

#include "clozekit/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "clozekit/error.h"
#include "clozekit/resources.h"
#include "clozekit/utf8.h"

namespace clozekit {
namespace {

namespace fs = std::filesystem;

std::string_view TrimView(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

bool IsTerminator(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

bool IsCloser(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U')' || cp == U']' ||
         cp == 0x2019 || cp == 0x201D || cp == 0xBB;
}

bool IsOpener(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U'(' || cp == U'[' ||
         cp == U'{' || cp == U'`' || cp == U'_' || cp == U'*' ||
         cp == 0x2018 || cp == 0x201C || cp == 0xAB;
}

bool IsTrailing(char32_t cp) {
  return cp == U'.' || cp == U',' || cp == U';' || cp == U':' ||
         cp == U'!' || cp == U'?' || cp == U'"' || cp == U'\'' ||
         cp == U')' || cp == U']' || cp == U'}' || cp == U'_' ||
         cp == U'*' || cp == 0x2019 || cp == 0x201D || cp == 0xBB ||
         cp == 0x2026;
}

bool IsDashChar(char32_t cp) { return cp == 0x2013 || cp == 0x2014; }

char32_t PeekAt(std::string_view text, std::size_t pos, std::size_t& next) {
  next = pos;
  return utf8::Decode(text, next);
}

constexpr std::array<std::string_view, 7> kClitics = {
    "n't", "'ll", "'re", "'ve", "'s", "'m", "'d"};

// Replaces a curly apostrophe with a straight one for matching.
std::string NormalizeApostrophes(std::string_view s) {
  std::string out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    char32_t cp = utf8::Decode(s, pos);
    utf8::Append(out, cp == 0x2019 ? U'\'' : utf8::ToLower(cp));
  }
  return out;
}

bool IsClitic(std::string_view s) {
  const std::string norm = NormalizeApostrophes(s);
  return std::find(kClitics.begin(), kClitics.end(), norm) != kClitics.end();
}

// Dotted acronym such as "U.S." or "a.m.".
bool IsAcronym(std::string_view s) {
  if (s.size() < 4 || s.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (!std::isalpha(c) || s[i + 1] != '.') return false;
  }
  return true;
}

bool KeepWhole(std::string_view s, const Abbreviations& abbreviations) {
  return abbreviations.Contains(s) || IsClitic(s) || IsAcronym(s);
}

bool HasAlnum(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const char32_t cp = utf8::Decode(s, pos);
    if (utf8::IsLetter(cp) || utf8::IsDigit(cp)) return true;
  }
  return false;
}

void SplitContraction(std::string_view word, std::vector<std::string>& out) {
  const std::string norm = NormalizeApostrophes(word);
  for (std::string_view clitic : kClitics) {
    if (norm.size() <= clitic.size() || !norm.ends_with(clitic)) continue;
    // Normalization maps a 3-byte curly apostrophe onto one byte, so locate
    // the clitic in the original by counting code points from the end.
    std::size_t cut = word.size();
    for (std::size_t n = 0; n < clitic.size(); ++n) {
      std::size_t begin;
      utf8::DecodeBefore(word, cut, begin);
      cut = begin;
    }
    std::string_view stem = word.substr(0, cut);
    if (!HasAlnum(stem)) break;
    out.emplace_back(stem);
    out.emplace_back(word.substr(cut));
    return;
  }
  out.emplace_back(word);
}

void TokenizePiece(std::string_view piece, const Abbreviations& abbreviations,
                   std::vector<std::string>& out) {
  if (piece.empty()) return;
  // Leading openers.
  while (!piece.empty() && !KeepWhole(piece, abbreviations)) {
    std::size_t next;
    const char32_t cp = PeekAt(piece, 0, next);
    if (!IsOpener(cp)) break;
    out.emplace_back(piece.substr(0, next));
    piece.remove_prefix(next);
  }
  // Trailing punctuation, collected right to left.
  std::vector<std::string_view> tail;
  while (!piece.empty() && !KeepWhole(piece, abbreviations)) {
    if (piece.size() > 3 && piece.ends_with("...")) {
      tail.push_back(piece.substr(piece.size() - 3));
      piece.remove_suffix(3);
      continue;
    }
    if (piece == "...") break;
    std::size_t begin;
    const char32_t cp = utf8::DecodeBefore(piece, piece.size(), begin);
    if (!IsTrailing(cp) || begin == 0) break;
    tail.push_back(piece.substr(begin));
    piece.remove_suffix(piece.size() - begin);
  }
  if (!piece.empty()) {
    if (KeepWhole(piece, abbreviations)) {
      out.emplace_back(piece);
    } else {
      SplitContraction(piece, out);
    }
  }
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.emplace_back(*it);
}

void TokenizeChunk(std::string_view chunk, const Abbreviations& abbreviations,
                   std::vector<std::string>& out) {
  if (KeepWhole(chunk, abbreviations)) {
    out.emplace_back(chunk);
    return;
  }
  std::size_t piece_start = 0;
  std::size_t pos = 0;
  while (pos < chunk.size()) {
    const std::size_t begin = pos;
    const char32_t cp = utf8::Decode(chunk, pos);
    std::size_t dash_end = 0;
    if (IsDashChar(cp)) {
      dash_end = pos;
    } else if (cp == U'-' && pos < chunk.size() && chunk[pos] == '-') {
      dash_end = pos;
      while (dash_end < chunk.size() && chunk[dash_end] == '-') ++dash_end;
    }
    if (dash_end == 0) continue;
    TokenizePiece(chunk.substr(piece_start, begin - piece_start),
                  abbreviations, out);
    out.emplace_back(chunk.substr(begin, dash_end - begin));
    pos = piece_start = dash_end;
  }
  TokenizePiece(chunk.substr(piece_start), abbreviations, out);
}

std::string ExtractTitle(std::string_view text) {
  std::size_t pos = 0;
  for (int line_no = 0; line_no < 200 && pos < text.size(); ++line_no) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = TrimView(text.substr(pos, end - pos));
    if (line.starts_with("Title:")) {
      return std::string(TrimView(line.substr(6)));
    }
    pos = end + 1;
  }
  return {};
}

}  // namespace

std::size_t TokenizedBook::TokenCount() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

BoilerplateMarkers BoilerplateMarkers::FromFile(const fs::path& path) {
  BoilerplateMarkers markers;
  markers.start.clear();
  markers.end.clear();
  std::size_t line_no = 0;
  for (const auto& entry : ReadWordList(path)) {
    ++line_no;
    const auto space = entry.find(' ');
    const std::string kind = entry.substr(0, space);
    const std::string prefix =
        space == std::string::npos ? "" : std::string(TrimView(entry.substr(space)));
    if (prefix.empty() || (kind != "start" && kind != "end")) {
      throw ParseError(path.string(), line_no,
                       "expected 'start <prefix>' or 'end <prefix>'");
    }
    (kind == "start" ? markers.start : markers.end).push_back(prefix);
  }
  return markers;
}

std::string StripBoilerplate(std::string_view text,
                             const BoilerplateMarkers& markers) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  auto matches = [](std::string_view line, const std::vector<std::string>& prefixes) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) return false;
    line.remove_prefix(first);
    return std::any_of(prefixes.begin(), prefixes.end(),
                       [&](const std::string& p) { return line.starts_with(p); });
  };
  std::ptrdiff_t start = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (matches(lines[i], markers.start)) {
      start = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }
  std::ptrdiff_t stop = -1;
  for (std::size_t i = lines.size(); i-- > 0;) {
    if (static_cast<std::ptrdiff_t>(i) <= start) break;
    if (matches(lines[i], markers.end)) {
      stop = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }
  if (start < 0 && stop < 0) return std::string(text);
  const std::size_t first = start < 0 ? 0 : static_cast<std::size_t>(start) + 1;
  const std::size_t last = stop < 0 ? lines.size() : static_cast<std::size_t>(stop);
  std::string body;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) body.push_back('\n');
    body.append(lines[i]);
  }
  return body;
}

IngestResult IngestBooks(const fs::path& directory, const IngestOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw IoError("not a directory: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == options.extension) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + directory.string() + ": " + ec.message());
  if (files.empty()) {
    throw EmptyCorpusError("no " + options.extension + " files in " +
                           directory.string());
  }
  std::sort(files.begin(), files.end());

  IngestResult result;
  for (const auto& file : files) {
    std::string text;
    try {
      text = ReadFile(file);
    } catch (const IoError& e) {
      result.errors.push_back({file, e.what()});
      continue;
    }
    if (!utf8::IsValid(text)) {
      result.errors.push_back({file, "not valid UTF-8"});
      continue;
    }
    text.erase(std::remove(text.begin(), text.end(), '\r'), text.end());
    RawBook book;
    book.book_id = options.id_scheme == IdScheme::kFileStem
                       ? file.stem().string()
                       : file.filename().string();
    book.title = ExtractTitle(text);
    if (book.title.empty()) book.title = file.stem().string();
    book.text = StripBoilerplate(text, options.markers);
    if (TrimView(book.text).empty()) {
      result.errors.push_back({file, "empty after boilerplate stripping"});
      continue;
    }
    result.books.push_back(std::move(book));
  }
  std::sort(result.books.begin(), result.books.end(),
            [](const RawBook& a, const RawBook& b) { return a.book_id < b.book_id; });
  return result;
}

Abbreviations::Abbreviations(std::vector<std::string> entries)
    : entries_(std::make_move_iterator(entries.begin()),
               std::make_move_iterator(entries.end())) {}

const Abbreviations& Abbreviations::Default() {
  static const Abbreviations kDefault(ParseWordList(DefaultAbbreviationsText()));
  return kDefault;
}

Abbreviations Abbreviations::FromFile(const fs::path& path) {
  return Abbreviations(ReadWordList(path));
}

bool Abbreviations::Contains(std::string_view word) const {
  return entries_.find(word) != entries_.end();
}

std::vector<std::string> SplitSentences(std::string_view text,
                                        const Abbreviations& abbreviations) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string_view s = TrimView(text.substr(start, end - start));
    if (!s.empty()) sentences.emplace_back(s);
    start = end;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t cp_begin = pos;
    const char32_t cp = utf8::Decode(text, pos);

    if (cp == U'\n') {
      std::size_t k = pos;
      while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
      if (k < text.size() && text[k] == '\n') {
        emit(cp_begin);
        pos = k;
      }
      continue;
    }
    if (!IsTerminator(cp)) continue;

    std::size_t j = pos;
    std::size_t next;
    bool single_period = cp == U'.';
    while (j < text.size() && IsTerminator(PeekAt(text, j, next))) {
      single_period = false;
      j = next;
    }
    while (j < text.size() && IsCloser(PeekAt(text, j, next))) j = next;
    if (j >= text.size()) {
      emit(text.size());
      pos = text.size();
      break;
    }
    if (!utf8::IsSpace(PeekAt(text, j, next))) {
      pos = j;
      continue;
    }
    std::size_t k = j;
    while (k < text.size() && utf8::IsSpace(PeekAt(text, k, next))) k = next;
    if (k >= text.size()) {
      emit(j);
      pos = k;
      continue;
    }
    const char32_t following = PeekAt(text, k, next);
    if (!utf8::IsUpper(following) && !IsOpener(following)) {
      pos = j;
      continue;
    }
    if (single_period) {
      std::size_t word_begin = cp_begin;
      while (word_begin > start &&
             std::string_view(" \t\n\r\f\v").find(text[word_begin - 1]) ==
                 std::string_view::npos) {
        --word_begin;
      }
      std::string_view word = text.substr(word_begin, pos - word_begin);
      while (!word.empty()) {
        const char32_t first = PeekAt(word, 0, next);
        if (!IsOpener(first)) break;
        word.remove_prefix(next);
      }
      const bool initial = word.size() == 2 && utf8::IsUpper(static_cast<unsigned char>(word[0])) &&
                           word[0] != 'I';
      if (abbreviations.Contains(word) || initial) {
        pos = j;
        continue;
      }
    }
    emit(j);
    pos = j;
  }
  emit(text.size());
  return sentences;
}

std::vector<std::string> Tokenize(std::string_view sentence,
                                  const Abbreviations& abbreviations) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  std::size_t chunk_start = std::string_view::npos;
  while (pos < sentence.size()) {
    const std::size_t begin = pos;
    const char32_t cp = utf8::Decode(sentence, pos);
    if (utf8::IsSpace(cp)) {
      if (chunk_start != std::string_view::npos) {
        TokenizeChunk(sentence.substr(chunk_start, begin - chunk_start),
                      abbreviations, tokens);
        chunk_start = std::string_view::npos;
      }
    } else if (chunk_start == std::string_view::npos) {
      chunk_start = begin;
    }
  }
  if (chunk_start != std::string_view::npos) {
    TokenizeChunk(sentence.substr(chunk_start), abbreviations, tokens);
  }
  return tokens;
}

TokenizedBook TokenizeBook(const RawBook& book, const Abbreviations& abbreviations) {
  TokenizedBook out;
  out.book_id = book.book_id;
  for (const auto& sentence : SplitSentences(book.text, abbreviations)) {
    auto tokens = Tokenize(sentence, abbreviations);
    if (!tokens.empty()) out.sentences.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace clozekit
