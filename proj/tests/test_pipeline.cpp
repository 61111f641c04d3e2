#include <gtest/gtest.h>

#include <sstream>

#include "xwgen/pipeline.hpp"

using namespace xwgen;

namespace {

Document doc(std::string id, std::string text) {
  Document d;
  d.doc_id = std::move(id);
  d.text = std::move(text);
  return d;
}

ClueRecord clue_for(const Document& d, const KeywordExtractor& ex, size_t which = 0, ClueConfig cfg = {}) {
  auto occ = extract_keywords(d, &ex);
  return generate_clue(d, occ.at(which), cfg, NormalizationTable::latin());
}

}  // namespace

TEST(Segmenter, SplitsOnTerminators) {
  auto text = utf8::decode("First one. Second one! Third? 最後。次");
  auto spans = split_sentences(text);
  std::vector<std::string> got;
  for (auto [b, e] : spans) got.push_back(utf8::encode(std::u32string_view(text).substr(b, e - b)));
  EXPECT_EQ(got, (std::vector<std::string>{"First one.", "Second one!", "Third?", "最後。", "次"}));
}

TEST(Segmenter, KeepsAbbreviations) {
  auto text = utf8::decode("U.S. media were split. Next.");
  auto spans = split_sentences(text);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].second, 22u);
}

TEST(Gazetteer, SingleMatch) {
  GazetteerExtractor ex({"Roomba"});
  auto occ = extract_keywords(doc("d", "the Roomba sold well"), &ex);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(occ[0].char_start, 4u);
  EXPECT_EQ(occ[0].char_end, 10u);
  EXPECT_EQ(occ[0].surface, "Roomba");
}

TEST(Gazetteer, LongestMatchWins) {
  GazetteerExtractor ex({"AB", "ABC"});
  auto occ = extract_keywords(doc("d", "xABCx"), &ex);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(occ[0].surface, "ABC");
  EXPECT_EQ(occ[0].char_start, 1u);
  EXPECT_EQ(occ[0].char_end, 4u);
}

TEST(Gazetteer, NonOverlappingAndOrdered) {
  GazetteerExtractor ex({"abc", "cde", "ab"});
  auto occ = extract_keywords(doc("d", "abcde ab cde"), &ex);
  ASSERT_EQ(occ.size(), 3u);
  EXPECT_EQ(occ[0].surface, "abc");
  EXPECT_EQ(occ[1].surface, "ab");
  EXPECT_EQ(occ[2].surface, "cde");
  for (size_t i = 1; i < occ.size(); ++i) EXPECT_LE(occ[i - 1].char_end, occ[i].char_start);
}

TEST(PreTagged, EmptyTags) {
  PreTaggedExtractor ex;
  auto d = doc("d", "Nothing tagged here.");
  d.pre_tagged_keywords = std::vector<TaggedSpan>{};
  EXPECT_TRUE(extract_keywords(d, &ex).empty());
}

TEST(PreTagged, OffsetsAreCodePoints) {
  PreTaggedExtractor ex;
  auto d = doc("d", "Café Roomba opened.");
  d.pre_tagged_keywords = std::vector<TaggedSpan>{{"Roomba", 5, 11}};
  auto occ = extract_keywords(d, &ex);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(occ[0].sentence_start, 0u);
}

TEST(PreTagged, MalformedOffsets) {
  PreTaggedExtractor ex;
  auto d = doc("d", "short text");
  d.pre_tagged_keywords = std::vector<TaggedSpan>{{"text", 6, 40}};
  try {
    extract_keywords(d, &ex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OffsetOutOfRange);
  }
  d.pre_tagged_keywords = std::vector<TaggedSpan>{{"text", 0, 4}};
  EXPECT_THROW(extract_keywords(d, &ex), Error);
}

TEST(Extract, Errors) {
  try {
    extract_keywords(doc("d", "text"), nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ExtractorUnavailable);
  }
  GazetteerExtractor ex({"x"});
  EXPECT_THROW(extract_keywords(doc("d", ""), &ex), Error);
}

TEST(Clue, MasksKeywordInLongSentence) {
  GazetteerExtractor ex({"liberal"});
  auto d = doc("n1",
               "U.S. media coverage of the election was divided between liberal and conservative media. "
               "Turnout was high.");
  auto c = clue_for(d, ex);
  EXPECT_EQ(c.clue_text, "U.S. media coverage of the election was divided between [Answer] and conservative media.");
  EXPECT_EQ(c.answer, "LIBERAL");
  EXPECT_EQ(c.source_doc, "n1");
}

TEST(Clue, AllOccurrencesMasked) {
  GazetteerExtractor ex({"AB"});
  ClueConfig cfg;
  cfg.min_context_chars = 0;
  auto c = clue_for(doc("d", "AB is AB."), ex, 0, cfg);
  EXPECT_EQ(c.clue_text, "[Answer] is [Answer].");
  // Same clue regardless of which occurrence it is generated from.
  EXPECT_EQ(clue_for(doc("d", "AB is AB."), ex, 1, cfg).clue_text, c.clue_text);
  // Five characters of context fall below the default minimum.
  try {
    clue_for(doc("d", "AB is AB."), ex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SentenceTooShort);
  }
}

TEST(Clue, KeywordAtSentenceStart) {
  GazetteerExtractor ex({"Roomba"});
  auto c = clue_for(doc("d", "Roomba sales rose."), ex);
  EXPECT_EQ(c.clue_text, "[Answer] sales rose.");
}

TEST(Clue, CustomMask) {
  GazetteerExtractor ex({"Roomba"});
  ClueConfig cfg;
  cfg.mask_token = "___";
  auto c = clue_for(doc("d", "Prices for Roomba fell sharply."), ex, 0, cfg);
  EXPECT_EQ(c.clue_text, "Prices for ___ fell sharply.");
}

TEST(TopicLexicon, AggregatesAcrossSentences) {
  GazetteerExtractor ex({"Roomba"});
  std::vector<Document> corpus{doc("d1", "The Roomba was launched in 2002. Sales of the Roomba rose quickly.")};
  auto r = build_topic_lexicon(corpus, &ex, NormalizationTable::latin());
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].source, Source::Topic);
  EXPECT_EQ(r.records[0].surface, "Roomba");
  EXPECT_EQ(r.records[0].clues,
            (std::vector<std::string>{"The [Answer] was launched in 2002.", "Sales of the [Answer] rose quickly."}));
  EXPECT_EQ(r.answers, (std::vector<std::string>{"ROOMBA"}));
}

TEST(TopicLexicon, NoKeywords) {
  GazetteerExtractor ex({"Roomba"});
  std::vector<Document> corpus{doc("d1", "Nothing relevant today."), doc("d2", "Still nothing.")};
  auto r = build_topic_lexicon(corpus, &ex, NormalizationTable::latin());
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.stats.documents_without_keywords, 2u);
}

TEST(TopicLexicon, OrderedByDocIdAndCountsSkips) {
  GazetteerExtractor ex({"Roomba", "X-", "Atoll"});
  std::vector<Document> corpus{
      doc("b", "Later the Roomba got a camera."),
      doc("a", "Early on the Roomba was a novelty. X- appears here too. Atoll."),
  };
  auto r = build_topic_lexicon(corpus, &ex, NormalizationTable::latin());
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].clues.front(), "Early on the [Answer] was a novelty.");
  EXPECT_EQ(r.stats.skipped_normalization, 1u);  // "X-" has one letter
  EXPECT_EQ(r.stats.unusable_clues, 1u);         // "Atoll." alone
  EXPECT_EQ(r.stats.keywords_without_clues, 1u);
}

TEST(TopicLexicon, Deterministic) {
  GazetteerExtractor ex({"alpha", "beta", "gamma"});
  std::vector<Document> corpus;
  for (int i = 0; i < 20; ++i) {
    corpus.push_back(doc("doc" + std::to_string((i * 7) % 20),
                         "Report " + std::to_string(i) + " mentions alpha and beta. Then gamma follows alpha."));
  }
  auto a = build_topic_lexicon(corpus, &ex, NormalizationTable::latin());
  auto b = build_topic_lexicon(corpus, &ex, NormalizationTable::latin());
  std::string ja, jb;
  for (const auto& r : a.records) ja += to_jsonl_record(r) + "\n";
  for (const auto& r : b.records) jb += to_jsonl_record(r) + "\n";
  EXPECT_EQ(ja, jb);
  for (const auto& r : a.records) {
    for (const auto& c : r.clues) {
      EXPECT_EQ(c.find(r.surface), std::string::npos) << c;
      EXPECT_NE(c.find("[Answer]"), std::string::npos) << c;
    }
  }
}

TEST(Corpus, ParseJsonLines) {
  std::istringstream in(R"({"doc_id":"a","text":"Roomba sales rose.","keywords":[{"surface":"Roomba","start":0,"end":6}]})"
                        "\n"
                        R"({"doc_id":"b","text":"Plain."})"
                        "\n");
  auto docs = parse_corpus_jsonl(in);
  ASSERT_EQ(docs.size(), 2u);
  ASSERT_TRUE(docs[0].pre_tagged_keywords.has_value());
  EXPECT_EQ(docs[0].pre_tagged_keywords->at(0).end, 6u);
  EXPECT_FALSE(docs[1].pre_tagged_keywords.has_value());

  std::istringstream bad(R"({"doc_id":"a"})" "\n");
  EXPECT_THROW(parse_corpus_jsonl(bad), Error);
}
