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

#include "clozekit/tagger.h"

#include <gtest/gtest.h>

#include "clozekit/corpus.h"
#include "clozekit/error.h"
#include "test_util.h"

namespace clozekit {
namespace {

constexpr WordType NE = WordType::kNamedEntity;
constexpr WordType CN = WordType::kCommonNoun;
constexpr WordType O = WordType::kOther;

TokenizedBook Book(const std::string& text) { return TokenizeBook({"book", "Book", text}); }

HeuristicTagger DefaultTagger() { return HeuristicTagger(TaggerConfig::Default()); }

TEST(WordTypeTest, TagsAndNames) {
  EXPECT_EQ(WordTypeTag(NE), "NE");
  EXPECT_EQ(WordTypeTag(CN), "CN");
  EXPECT_EQ(WordTypeTag(O), "O");
  EXPECT_EQ(ParseWordTypeTag("CN"), CN);
  EXPECT_FALSE(ParseWordTypeTag("cn").has_value());
  EXPECT_EQ(ParseWordTypeName("ne"), NE);
  EXPECT_EQ(ParseWordTypeName("Cn"), CN);
  EXPECT_EQ(ParseWordTypeName("NE"), NE);
  EXPECT_FALSE(ParseWordTypeName("verb").has_value());
}

TEST(HeuristicTaggerTest, DocumentedExamples) {
  const TokenizedBook book = Book("We went to London today. The dog ran quickly.");
  const BookLabels labels = DefaultTagger().Tag(book);
  ASSERT_TRUE(LabelsAligned(book, labels));
  EXPECT_EQ(book.sentences[0][3], "London");
  EXPECT_EQ(labels[0][3], NE);
  EXPECT_EQ(book.sentences[1][1], "dog");
  EXPECT_EQ(labels[1][1], CN);
  EXPECT_EQ(book.sentences[1][3], "quickly");
  EXPECT_EQ(labels[1][3], O);
}

TEST(HeuristicTaggerTest, SentenceInitialCapitalNeedsSupport) {
  // "Ahab" is initial in the first sentence but also appears mid-sentence,
  // so both occurrences are entities. "Yesterday" is only ever initial.
  const TokenizedBook book = Book("Ahab slept. Yesterday the sea rose. Then Ahab woke.");
  const BookLabels labels = DefaultTagger().Tag(book);
  EXPECT_EQ(labels[0][0], NE);
  EXPECT_EQ(labels[1][0], O);
  EXPECT_EQ(labels[2][1], NE);
}

TEST(HeuristicTaggerTest, InitialAfterOpeningQuote) {
  const TokenizedBook book = Book("She said \"Stop now.\" Stop was all.");
  const BookLabels labels = DefaultTagger().Tag(book);
  // Capitalized after an opening quote counts as initial, never supported.
  EXPECT_EQ(book.sentences[0][3], "Stop");
  EXPECT_EQ(labels[0][3], O);
}

TEST(HeuristicTaggerTest, StopwordsAndHonorificsAreOther) {
  TaggerConfig config;
  config.noun_lexicon = {"ship", "the"};
  config.stopwords = {"the", "i"};
  config.honorifics = {"mr"};
  const TokenizedBook book = Book("Then I saw the ship and Mr. Stubb near I and Mr. Stubb.");
  const BookLabels labels = HeuristicTagger(config).Tag(book);
  const auto& s = book.sentences[0];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == "the" || s[i] == "I" || s[i] == "Mr.") EXPECT_EQ(labels[0][i], O) << s[i];
    if (s[i] == "ship") EXPECT_EQ(labels[0][i], CN);
    if (s[i] == "Stubb") EXPECT_EQ(labels[0][i], NE);
  }
}

TEST(HeuristicTaggerTest, CapitalizedLexiconWordIsNotACommonNoun) {
  TaggerConfig config;
  config.noun_lexicon = {"whale"};
  const TokenizedBook book = Book("the Whale and the whale met.");
  const BookLabels labels = HeuristicTagger(config).Tag(book);
  EXPECT_EQ(labels[0][1], NE);
  EXPECT_EQ(labels[0][4], CN);
}

TEST(HeuristicTaggerTest, EmptyLexiconIsRejected) {
  TaggerConfig config;
  EXPECT_THROW(config.Validate(), ValidationError);
  EXPECT_THROW(HeuristicTagger{config}, ValidationError);
  EXPECT_NO_THROW(TaggerConfig::Default().Validate());
  EXPECT_GT(TaggerConfig::Default().noun_lexicon.size(), 10000u);
}

TEST(HeuristicTaggerTest, ConfigFromFilesFallsBackPerField) {
  testing::TempDir dir;
  testing::WriteText(dir / "nouns.txt", "Boat\nsail\n");
  const TaggerConfig config = TaggerConfig::FromFiles(dir / "nouns.txt", {}, {});
  EXPECT_EQ(config.noun_lexicon.size(), 2u);
  EXPECT_TRUE(config.noun_lexicon.contains("boat"));
  EXPECT_EQ(config.stopwords, TaggerConfig::Default().stopwords);
  EXPECT_THROW(TaggerConfig::FromFiles(dir / "missing.txt", {}, {}), IoError);
}

TEST(PretaggedTaggerTest, AlignedFilePassesThrough) {
  const TokenizedBook book = Book("Ahab saw the whale. It dove.");
  const BookLabels expected = DefaultTagger().Tag(book);
  PretaggedTagger pretagged;
  pretagged.Add("book", FormatPretagged(book, expected));
  EXPECT_EQ(pretagged.Tag(book), expected);
}

TEST(PretaggedTaggerTest, TagAfterLastSlash) {
  const TokenizedBook book = Book("and/or cats.");
  PretaggedTagger pretagged;
  pretagged.Add("book", "and/or/O cats/CN ./O\n");
  EXPECT_EQ(pretagged.Tag(book), (BookLabels{{O, CN, O}}));
}

TEST(PretaggedTaggerTest, MissingLabelRaisesAlignmentError) {
  const TokenizedBook book = Book("Ahab saw the whale. It dove.");
  PretaggedTagger pretagged;
  pretagged.Add("book", "Ahab/NE saw/O the/O whale/CN ./O\nIt/O ./O\n");
  try {
    pretagged.Tag(book);
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    const std::string message = e.what();
    EXPECT_NE(message.find("book"), std::string::npos);
    EXPECT_NE(message.find("sentence 1"), std::string::npos) << message;
  }
}

TEST(PretaggedTaggerTest, UnknownBookAndBadTag) {
  PretaggedTagger pretagged;
  EXPECT_THROW(pretagged.Tag(Book("Hi.")), AlignmentError);
  EXPECT_THROW(pretagged.Add("b", "word/XX\n"), ParseError);
}

TEST(PretaggedTaggerTest, LoadsDirectory) {
  testing::TempDir dir;
  testing::WriteText(dir / "book.tags", "Hi/O ./O\n");
  const PretaggedTagger pretagged = PretaggedTagger::FromDirectory(dir.path());
  EXPECT_EQ(pretagged.Tag(Book("Hi.")), (BookLabels{{O, O}}));
}

// Any tagger produces one label per token on real text.
TEST(TaggerPropertyTest, EveryImplementationLabelsEveryToken) {
  const IngestResult corpus = IngestBooks(testing::TestDataDir() / "corpus");
  const HeuristicTagger heuristic = DefaultTagger();
  for (const auto& raw : corpus.books) {
    const TokenizedBook book = TokenizeBook(raw);
    const BookLabels labels = heuristic.Tag(book);
    EXPECT_TRUE(LabelsAligned(book, labels)) << raw.book_id;
    PretaggedTagger pretagged;
    pretagged.Add(book.book_id, FormatPretagged(book, labels));
    const BookLabels round = pretagged.Tag(book);
    EXPECT_TRUE(LabelsAligned(book, round));
    EXPECT_EQ(round, labels);
  }
}

}  // namespace
}  // namespace clozekit
