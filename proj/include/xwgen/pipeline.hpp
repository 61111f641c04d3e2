#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xwgen/error.hpp"
#include "xwgen/lexicon.hpp"
#include "xwgen/utf8.hpp"

namespace xwgen {

/// A keyword span supplied by an external tagger. Offsets are code points.
struct TaggedSpan {
  std::string surface;
  size_t start = 0;
  size_t end = 0;
};

struct Document {
  std::string doc_id;
  std::string text;
  std::optional<std::vector<TaggedSpan>> pre_tagged_keywords;
};

struct KeywordOccurrence {
  std::string surface;
  std::string doc_id;
  size_t char_start = 0;
  size_t char_end = 0;
  size_t sentence_start = 0;
  size_t sentence_end = 0;

  friend bool operator==(const KeywordOccurrence&, const KeywordOccurrence&) = default;
};

struct ClueRecord {
  std::string answer;
  std::string surface;
  std::string clue_text;
  std::string source_doc;
};

// ---------------------------------------------------------------------------
// Sentence segmentation.

struct SegmenterConfig {
  /// Terminators that end a sentence when followed by whitespace or end of text.
  std::u32string terminators = U".!?";
  /// Terminators that always end a sentence (scripts written without spaces).
  std::u32string hard_terminators = U"。！？";
};

namespace detail {

// "U.S." or "J." before a period: treat the period as part of an abbreviation.
inline bool is_abbreviation(std::u32string_view text, size_t dot) {
  size_t b = dot;
  while (b > 0 && !utf8::is_space(text[b - 1])) --b;
  std::u32string_view token = text.substr(b, dot - b);
  if (token.empty()) return false;
  if (token.find(U'.') != std::u32string_view::npos) return true;
  return token.size() == 1 && ((token[0] >= U'A' && token[0] <= U'Z') || (token[0] >= U'a' && token[0] <= U'z'));
}

}  // namespace detail

/// Sentence spans [start, end) in code points, leading whitespace excluded.
inline std::vector<std::pair<size_t, size_t>> split_sentences(std::u32string_view text,
                                                             const SegmenterConfig& config = {}) {
  std::vector<std::pair<size_t, size_t>> spans;
  size_t start = 0;
  auto flush = [&](size_t end) {
    while (start < end && utf8::is_space(text[start])) ++start;
    size_t e = end;
    while (e > start && utf8::is_space(text[e - 1])) --e;
    if (e > start) spans.push_back({start, e});
    start = end;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char32_t c = text[i];
    if (config.hard_terminators.find(c) != std::u32string::npos) {
      flush(i + 1);
    } else if (config.terminators.find(c) != std::u32string::npos) {
      bool boundary = i + 1 == text.size() || utf8::is_space(text[i + 1]);
      if (boundary && c == U'.' && detail::is_abbreviation(text, i)) boundary = false;
      if (boundary) flush(i + 1);
    }
  }
  flush(text.size());
  return spans;
}

// ---------------------------------------------------------------------------
// Keyword extraction.

/// Pluggable keyword detector. Implementations return occurrences in document
/// order; sentence spans are filled in by extract_keywords().
class KeywordExtractor {
 public:
  virtual ~KeywordExtractor() = default;
  virtual std::vector<KeywordOccurrence> find(const Document& doc, std::u32string_view text) const = 0;
};

/// Passes through spans produced by an external tagger.
class PreTaggedExtractor final : public KeywordExtractor {
 public:
  std::vector<KeywordOccurrence> find(const Document& doc, std::u32string_view text) const override {
    std::vector<KeywordOccurrence> out;
    if (!doc.pre_tagged_keywords) return out;
    for (const auto& span : *doc.pre_tagged_keywords) {
      if (span.start >= span.end || span.end > text.size() ||
          utf8::encode(text.substr(span.start, span.end - span.start)) != span.surface) {
        throw Error(ErrorCode::OffsetOutOfRange, doc.doc_id + ": tag '" + span.surface + "' at [" +
                                                     std::to_string(span.start) + ", " +
                                                     std::to_string(span.end) + ") does not match text");
      }
      out.push_back({span.surface, doc.doc_id, span.start, span.end, 0, 0});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.char_start < b.char_start; });
    return out;
  }
};

/// Longest-match, non-overlapping literal search over a term list.
class GazetteerExtractor final : public KeywordExtractor {
 public:
  explicit GazetteerExtractor(const std::vector<std::string>& terms) {
    for (const auto& t : terms) {
      auto u = utf8::decode(t);
      if (!u.empty()) by_first_[u.front()].insert(std::move(u));
    }
  }

  static GazetteerExtractor load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open gazetteer " + path);
    std::vector<std::string> terms;
    for (auto& r : parse_word_list(in, Source::Topic)) terms.push_back(std::move(r.surface));
    return GazetteerExtractor(terms);
  }

  std::vector<KeywordOccurrence> find(const Document& doc, std::u32string_view text) const override {
    std::vector<KeywordOccurrence> out;
    size_t i = 0;
    while (i < text.size()) {
      auto it = by_first_.find(text[i]);
      size_t matched = 0;
      if (it != by_first_.end()) {
        for (const auto& term : it->second) {
          if (term.size() <= text.size() - i && text.compare(i, term.size(), term) == 0) {
            matched = term.size();
            break;
          }
        }
      }
      if (matched) {
        out.push_back({utf8::encode(text.substr(i, matched)), doc.doc_id, i, i + matched, 0, 0});
        i += matched;
      } else {
        ++i;
      }
    }
    return out;
  }

 private:
  struct LongestFirst {
    bool operator()(const std::u32string& a, const std::u32string& b) const {
      return a.size() != b.size() ? a.size() > b.size() : a < b;
    }
  };
  std::map<char32_t, std::set<std::u32string, LongestFirst>> by_first_;
};

inline std::vector<KeywordOccurrence> extract_keywords(const Document& doc, const KeywordExtractor* extractor,
                                                       const SegmenterConfig& segmenter = {}) {
  if (!extractor) throw Error(ErrorCode::ExtractorUnavailable, "no keyword extractor configured");
  if (doc.text.empty()) throw Error(ErrorCode::EmptyInput, doc.doc_id + ": empty document text");
  auto text = utf8::decode(doc.text);
  auto occurrences = extractor->find(doc, text);
  auto sentences = split_sentences(text, segmenter);
  for (auto& occ : occurrences) {
    for (const auto& [b, e] : sentences) {
      if (occ.char_start >= b && occ.char_start < e) {
        occ.sentence_start = b;
        // A tag running past a boundary keeps the whole tag in its sentence.
        occ.sentence_end = std::max(e, occ.char_end);
        break;
      }
    }
    if (occ.sentence_end == 0) {
      occ.sentence_start = occ.char_start;
      occ.sentence_end = occ.char_end;
    }
  }
  return occurrences;
}

// ---------------------------------------------------------------------------
// Fill-in-the-blank clues.

struct ClueConfig {
  std::string mask_token = "[Answer]";
  /// Clues with fewer code points than this outside the mask tokens are unusable.
  size_t min_context_chars = 10;
};

/// Replaces the occurrence, and every other occurrence of the same surface in
/// its sentence, by the mask token.
inline ClueRecord generate_clue(const Document& doc, const KeywordOccurrence& occ, const ClueConfig& config,
                                const NormalizationTable& table) {
  auto text = utf8::decode(doc.text);
  if (occ.char_end > text.size() || occ.sentence_end > text.size() || occ.sentence_start > occ.char_start ||
      occ.char_end > occ.sentence_end) {
    throw Error(ErrorCode::OffsetOutOfRange, doc.doc_id + ": occurrence outside its document or sentence");
  }
  const auto surface = utf8::decode(occ.surface);
  const auto mask = utf8::decode(config.mask_token);
  std::u32string_view sentence(text.data() + occ.sentence_start, occ.sentence_end - occ.sentence_start);
  const size_t own = occ.char_start - occ.sentence_start;

  std::u32string clue;
  size_t context = 0;
  size_t i = 0;
  while (i < sentence.size()) {
    bool hit = i == own || (!surface.empty() && sentence.compare(i, surface.size(), surface) == 0 &&
                            (i + surface.size() <= own || i >= own + surface.size()));
    if (hit) {
      clue += mask;
      i += i == own ? occ.char_end - occ.char_start : surface.size();
    } else {
      clue.push_back(sentence[i]);
      ++context;
      ++i;
    }
  }
  if (context < config.min_context_chars) {
    throw Error(ErrorCode::SentenceTooShort, doc.doc_id + ": clue for '" + occ.surface + "' has only " +
                                                 std::to_string(context) + " context characters");
  }
  if (clue.find(surface) != std::u32string::npos) {
    throw Error(ErrorCode::AnswerLeak, doc.doc_id + ": clue still contains '" + occ.surface + "'");
  }
  ClueRecord rec;
  rec.answer = normalize(occ.surface, table);
  rec.surface = occ.surface;
  rec.clue_text = utf8::encode(clue);
  rec.source_doc = doc.doc_id;
  return rec;
}

// ---------------------------------------------------------------------------
// Corpus to topic lexicon.

struct PipelineStats {
  size_t documents = 0;
  size_t occurrences = 0;
  size_t documents_without_keywords = 0;
  size_t skipped_normalization = 0;
  size_t unusable_clues = 0;
  size_t keywords_without_clues = 0;
};

struct TopicLexiconResult {
  std::vector<RawEntry> records;  // sorted by normalized answer
  std::vector<std::string> answers;
  PipelineStats stats;
};

/// One Topic record per distinct normalized keyword, carrying every usable
/// clue in (doc_id, offset) order. Keywords with no usable clue are dropped.
inline TopicLexiconResult build_topic_lexicon(const std::vector<Document>& corpus, const KeywordExtractor* extractor,
                                              const NormalizationTable& table, const ClueConfig& clue_config = {},
                                              const SegmenterConfig& segmenter = {}) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyInput, "corpus has no documents");
  std::vector<const Document*> docs;
  for (const auto& d : corpus) docs.push_back(&d);
  std::stable_sort(docs.begin(), docs.end(), [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });

  struct Acc {
    std::string surface;
    std::vector<std::string> clues;
  };
  std::map<std::string, Acc> by_answer;
  TopicLexiconResult result;
  for (const Document* doc : docs) {
    ++result.stats.documents;
    auto occurrences = extract_keywords(*doc, extractor, segmenter);
    if (occurrences.empty()) ++result.stats.documents_without_keywords;
    for (const auto& occ : occurrences) {
      ++result.stats.occurrences;
      std::string answer;
      try {
        answer = normalize(occ.surface, table);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooShort && e.code() != ErrorCode::Unmappable && e.code() != ErrorCode::EmptyInput) throw;
        ++result.stats.skipped_normalization;
        continue;
      }
      auto [it, inserted] = by_answer.try_emplace(answer);
      if (inserted) it->second.surface = occ.surface;
      try {
        auto clue = generate_clue(*doc, occ, clue_config, table);
        auto& clues = it->second.clues;
        if (std::find(clues.begin(), clues.end(), clue.clue_text) == clues.end()) clues.push_back(clue.clue_text);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SentenceTooShort && e.code() != ErrorCode::AnswerLeak) throw;
        ++result.stats.unusable_clues;
      }
    }
  }
  for (auto& [answer, acc] : by_answer) {
    if (acc.clues.empty()) {
      ++result.stats.keywords_without_clues;
      continue;
    }
    result.answers.push_back(answer);
    result.records.push_back({acc.surface, Source::Topic, std::move(acc.clues)});
  }
  return result;
}

/// {"doc_id": s, "text": s, "keywords": [{"surface": s, "start": i, "end": j}]}
inline std::vector<Document> parse_corpus_jsonl(std::istream& in, const std::string& name = "<corpus>") {
  std::vector<Document> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::ParseError, name + ":" + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    if (!doc.is_object() || !doc.contains("doc_id") || !doc["doc_id"].is_string() || !doc.contains("text") ||
        !doc["text"].is_string()) {
      throw fail("record needs string \"doc_id\" and \"text\"");
    }
    Document d;
    d.doc_id = doc["doc_id"].get<std::string>();
    d.text = doc["text"].get<std::string>();
    if (doc.contains("keywords")) {
      if (!doc["keywords"].is_array()) throw fail("\"keywords\" must be an array");
      d.pre_tagged_keywords.emplace();
      for (const auto& k : doc["keywords"]) {
        if (!k.is_object() || !k.contains("surface") || !k.contains("start") || !k.contains("end") ||
            !k["surface"].is_string() || !k["start"].is_number_unsigned() || !k["end"].is_number_unsigned()) {
          throw fail("keyword needs \"surface\", \"start\", \"end\"");
        }
        d.pre_tagged_keywords->push_back(
            {k["surface"].get<std::string>(), k["start"].get<size_t>(), k["end"].get<size_t>()});
      }
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace xwgen
