#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xwgen/error.hpp"
#include "xwgen/utf8.hpp"

namespace xwgen {

enum class Source : std::uint8_t { Topic, Filler };

inline const char* to_string(Source s) { return s == Source::Topic ? "topic" : "filler"; }

inline Source parse_source(std::string_view s) {
  if (s == "topic") return Source::Topic;
  if (s == "filler") return Source::Filler;
  throw Error(ErrorCode::ParseError, "unknown source '" + std::string(s) + "'");
}

enum class DropPolicy : std::uint8_t { Reject, Skip };

/// Maps code-point sequences onto the grid alphabet. Lookup is greedy
/// longest-match from left to right.
class NormalizationTable {
 public:
  NormalizationTable() = default;
  NormalizationTable(std::map<std::u32string, std::u32string> mappings, DropPolicy drop_policy)
      : mappings_(std::move(mappings)), drop_policy_(drop_policy) {
    close_over_outputs();
  }

  /// Uppercase ASCII letters, fold Latin-1 and Latin Extended-A letters to
  /// their base letter, drop combining marks. Anything else is skipped.
  static NormalizationTable latin(DropPolicy policy = DropPolicy::Skip) {
    std::map<std::u32string, std::u32string> m;
    for (char32_t c = U'A'; c <= U'Z'; ++c) {
      m[std::u32string(1, c)] = std::u32string(1, c);
      m[std::u32string(1, c + 32)] = std::u32string(1, c);
    }
    // U+00C0..U+00FF; "" marks non-letters (multiplication/division signs).
    static const char* latin1[64] = {
        "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I",  "I",
        "D", "N", "O", "O", "O", "O", "O",  "",  "O", "U", "U", "U", "U", "Y", "TH", "SS",
        "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I",  "I",
        "D", "N", "O", "O", "O", "O", "O",  "",  "O", "U", "U", "U", "U", "Y", "TH", "Y"};
    for (int i = 0; i < 64; ++i) {
      if (latin1[i][0] != '\0') m[std::u32string(1, char32_t(0xC0 + i))] = to_u32(latin1[i]);
    }
    // U+0100..U+017F as runs of (base, count).
    static const std::pair<const char*, int> ext_a[] = {
        {"A", 6},  {"C", 8},  {"D", 4}, {"E", 10}, {"G", 8}, {"H", 4}, {"I", 10}, {"IJ", 2},
        {"J", 2},  {"K", 3},  {"L", 10}, {"N", 9}, {"O", 6}, {"OE", 2}, {"R", 6}, {"S", 8},
        {"T", 6},  {"U", 12}, {"W", 2}, {"Y", 3},  {"Z", 6}, {"S", 1}};
    char32_t cp = 0x100;
    for (const auto& [base, n] : ext_a) {
      for (int k = 0; k < n; ++k) m[std::u32string(1, cp++)] = to_u32(base);
    }
    for (char32_t mark = 0x300; mark <= 0x36F; ++mark) m[std::u32string(1, mark)] = U"";
    return NormalizationTable(std::move(m), policy);
  }

  /// Reads {"<source>": "<replacement>", ..., "drop_policy": "reject"|"skip"}.
  static NormalizationTable from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "normalization table must be a JSON object");
    std::map<std::u32string, std::u32string> m;
    DropPolicy policy = DropPolicy::Reject;
    for (const auto& [key, value] : doc.items()) {
      if (!value.is_string()) {
        throw Error(ErrorCode::ParseError, "normalization value for '" + key + "' is not a string");
      }
      if (key == "drop_policy") {
        const auto v = value.get<std::string>();
        if (v == "reject") {
          policy = DropPolicy::Reject;
        } else if (v == "skip") {
          policy = DropPolicy::Skip;
        } else {
          throw Error(ErrorCode::ParseError, "drop_policy must be 'reject' or 'skip'");
        }
        continue;
      }
      if (key.empty()) throw Error(ErrorCode::ParseError, "empty source sequence in table");
      m[utf8::decode(key)] = utf8::decode(value.get<std::string>());
    }
    return NormalizationTable(std::move(m), policy);
  }

  static NormalizationTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open normalization table " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
  }

  DropPolicy drop_policy() const { return drop_policy_; }
  const std::map<std::u32string, std::u32string>& mappings() const { return mappings_; }

  /// Applies the table. Returns false and sets `bad` on the first unmappable
  /// code point when the policy is Reject.
  bool apply(std::u32string_view in, std::u32string& out, char32_t& bad) const {
    out.clear();
    size_t i = 0;
    while (i < in.size()) {
      size_t take = std::min(max_key_, in.size() - i);
      bool matched = false;
      for (; take > 0; --take) {
        auto it = mappings_.find(std::u32string(in.substr(i, take)));
        if (it != mappings_.end()) {
          out += it->second;
          i += take;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (drop_policy_ == DropPolicy::Reject) {
        bad = in[i];
        return false;
      }
      ++i;
    }
    return true;
  }

 private:
  static std::u32string to_u32(const char* ascii) {
    std::u32string s;
    for (; *ascii; ++ascii) s.push_back(static_cast<char32_t>(*ascii));
    return s;
  }

  // Idempotence: every output code point must map to itself.
  void close_over_outputs() {
    std::vector<char32_t> outputs;
    for (const auto& [k, v] : mappings_) outputs.insert(outputs.end(), v.begin(), v.end());
    for (char32_t c : outputs) mappings_.try_emplace(std::u32string(1, c), std::u32string(1, c));
    max_key_ = 1;
    for (const auto& [k, v] : mappings_) max_key_ = std::max(max_key_, k.size());
  }

  std::map<std::u32string, std::u32string> mappings_;
  DropPolicy drop_policy_ = DropPolicy::Skip;
  size_t max_key_ = 1;
};

/// Normalizes a surface form into a grid-alphabet answer (UTF-8).
inline std::string normalize(std::string_view surface, const NormalizationTable& table) {
  if (surface.empty()) throw Error(ErrorCode::EmptyInput, "empty surface form");
  std::u32string out;
  char32_t bad = 0;
  if (!table.apply(utf8::decode(surface), out, bad)) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(bad));
    throw Error(ErrorCode::Unmappable, std::string(buf) + " in '" + std::string(surface) + "'");
  }
  for (char32_t c : out) {
    if (utf8::is_space(c)) throw Error(ErrorCode::Unmappable, "table produced whitespace for '" + std::string(surface) + "'");
  }
  if (out.size() < 2) {
    throw Error(ErrorCode::TooShort, "'" + std::string(surface) + "' normalizes to fewer than 2 letters");
  }
  return utf8::encode(out);
}

struct LexiconEntry {
  std::string answer;
  std::u32string letters;
  std::string surface;
  Source source = Source::Filler;
  std::vector<std::string> clues;

  int length() const { return static_cast<int>(letters.size()); }

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

/// A raw record as read from a lexicon file, before normalization.
struct RawEntry {
  std::string surface;
  Source source = Source::Filler;
  std::vector<std::string> clues;
};

struct IngestStats {
  size_t records = 0;
  size_t skipped_too_short = 0;
  size_t skipped_unmappable = 0;
  size_t merged_duplicates = 0;
};

/// Answer-unique word list. Entries are sorted by answer; entry ids are
/// positions in that order.
class Lexicon {
 public:
  Lexicon() = default;

  /// Normalizes and merges raw records. Duplicated answers collapse into one
  /// entry; Topic wins over Filler and clue lists are unioned.
  static Lexicon build(const std::vector<RawEntry>& raw, const NormalizationTable& table,
                       IngestStats* stats = nullptr) {
    IngestStats local;
    std::map<std::string, LexiconEntry> merged;
    for (const auto& r : raw) {
      ++local.records;
      std::string answer;
      try {
        answer = normalize(r.surface, table);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::TooShort || e.code() == ErrorCode::EmptyInput) {
          ++local.skipped_too_short;
        } else if (e.code() == ErrorCode::Unmappable) {
          ++local.skipped_unmappable;
        } else {
          throw;
        }
        continue;
      }
      auto [it, inserted] = merged.try_emplace(answer);
      LexiconEntry& e = it->second;
      if (inserted) {
        e.answer = answer;
        e.letters = utf8::decode(answer);
        e.surface = r.surface;
        e.source = r.source;
        e.clues = r.clues;
        continue;
      }
      ++local.merged_duplicates;
      if (r.source == Source::Topic && e.source == Source::Filler) {
        e.source = Source::Topic;
        e.surface = r.surface;
        std::vector<std::string> clues = r.clues;
        for (const auto& c : e.clues) clues.push_back(c);
        e.clues = std::move(clues);
      } else {
        e.clues.insert(e.clues.end(), r.clues.begin(), r.clues.end());
      }
      dedupe_clues(e.clues);
    }
    Lexicon lex;
    lex.entries_.reserve(merged.size());
    for (auto& [answer, entry] : merged) {
      dedupe_clues(entry.clues);
      lex.entries_.push_back(std::move(entry));
    }
    lex.recount();
    if (stats) *stats = local;
    return lex;
  }

  /// Builds from already-normalized entries (answers must be unique).
  static Lexicon from_entries(std::vector<LexiconEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const LexiconEntry& a, const LexiconEntry& b) { return a.answer < b.answer; });
    for (size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].answer == entries[i - 1].answer) {
        throw Error(ErrorCode::InvalidConfig, "duplicate answer " + entries[i].answer);
      }
    }
    for (auto& e : entries) {
      if (e.letters.empty()) e.letters = utf8::decode(e.answer);
    }
    Lexicon lex;
    lex.entries_ = std::move(entries);
    lex.recount();
    return lex;
  }

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const LexiconEntry& operator[](size_t id) const { return entries_[id]; }

  size_t topic_count() const { return topic_; }
  size_t filler_count() const { return entries_.size() - topic_; }

  const LexiconEntry* find(std::string_view answer) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), answer,
                               [](const LexiconEntry& e, std::string_view a) { return e.answer < a; });
    if (it == entries_.end() || it->answer != answer) return nullptr;
    return &*it;
  }

 private:
  static void dedupe_clues(std::vector<std::string>& clues) {
    std::vector<std::string> out;
    for (auto& c : clues) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
    clues = std::move(out);
  }

  void recount() {
    topic_ = static_cast<size_t>(std::count_if(entries_.begin(), entries_.end(),
                                               [](const LexiconEntry& e) { return e.source == Source::Topic; }));
  }

  std::vector<LexiconEntry> entries_;
  size_t topic_ = 0;
};

// ---------------------------------------------------------------------------
// File formats.

enum class LexiconFormat { Auto, WordList, JsonLines };

struct LexiconSource {
  std::string path;
  LexiconFormat format = LexiconFormat::Auto;
  /// Source assigned to plain word-list lines.
  Source default_source = Source::Filler;
};

/// Plain word list: one surface form per line, '#' comments ignored.
inline std::vector<RawEntry> parse_word_list(std::istream& in, Source source) {
  std::vector<RawEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    auto end = line.find_last_not_of(" \t");
    out.push_back({line.substr(start, end - start + 1), source, {}});
  }
  return out;
}

/// JSON Lines: {"surface": s, "source": "topic"|"filler", "clues": [...]}.
inline std::vector<RawEntry> parse_lexicon_jsonl(std::istream& in, const std::string& name = "<input>") {
  std::vector<RawEntry> out;
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
    if (!doc.is_object() || !doc.contains("surface") || !doc["surface"].is_string()) {
      throw fail("record needs a string \"surface\"");
    }
    RawEntry r;
    r.surface = doc["surface"].get<std::string>();
    if (!doc.contains("source") || !doc["source"].is_string()) throw fail("record needs a string \"source\"");
    try {
      r.source = parse_source(doc["source"].get<std::string>());
    } catch (const Error& e) {
      throw fail(e.what());
    }
    if (doc.contains("clues")) {
      if (!doc["clues"].is_array()) throw fail("\"clues\" must be an array");
      for (const auto& c : doc["clues"]) {
        if (!c.is_string()) throw fail("clues must be strings");
        r.clues.push_back(c.get<std::string>());
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string to_jsonl_record(const RawEntry& r) {
  nlohmann::json doc;
  doc["surface"] = r.surface;
  doc["source"] = to_string(r.source);
  doc["clues"] = r.clues;
  return doc.dump();
}

struct IngestResult {
  Lexicon lexicon;
  IngestStats stats;
};

inline LexiconFormat detect_format(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  return (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") ? LexiconFormat::JsonLines
                                                                 : LexiconFormat::WordList;
}

inline IngestResult ingest_lexicon(const std::vector<LexiconSource>& sources, const NormalizationTable& table) {
  std::vector<RawEntry> raw;
  for (const auto& src : sources) {
    std::ifstream in(src.path);
    if (!in) throw Error(ErrorCode::Io, "cannot open lexicon " + src.path);
    auto format = src.format == LexiconFormat::Auto ? detect_format(src.path) : src.format;
    auto records = format == LexiconFormat::JsonLines ? parse_lexicon_jsonl(in, src.path)
                                                      : parse_word_list(in, src.default_source);
    raw.insert(raw.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
  }
  IngestResult result;
  result.lexicon = Lexicon::build(raw, table, &result.stats);
  return result;
}

}  // namespace xwgen
