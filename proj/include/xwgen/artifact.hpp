#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "xwgen/error.hpp"
#include "xwgen/grid.hpp"
#include "xwgen/lexicon.hpp"
#include "xwgen/rng.hpp"
#include "xwgen/solver.hpp"
#include "xwgen/utf8.hpp"

namespace xwgen {

inline constexpr const char* kGeneratorVersion = "xwgen 1.0.0";

struct PuzzleEntry {
  int slot_id = 0;
  Orientation orientation = Orientation::Across;
  int row = 0;
  int col = 0;
  int length = 0;
  std::string answer;
  std::string surface;
  Source source = Source::Filler;
  std::string clue;

  friend bool operator==(const PuzzleEntry&, const PuzzleEntry&) = default;
};

struct PuzzleMetadata {
  int target_rate = 0;
  double achieved_topic_ratio = 0.0;
  Seed seed = 0;
  std::int64_t elapsed_ms = 0;
  std::uint64_t restarts = 0;
  std::uint64_t nodes_expanded = 0;
  std::string generator_version = kGeneratorVersion;

  friend bool operator==(const PuzzleMetadata&, const PuzzleMetadata&) = default;
};

struct Puzzle {
  GridPattern pattern;
  std::vector<PuzzleEntry> entries;
  PuzzleMetadata metadata;

  friend bool operator==(const Puzzle&, const Puzzle&) = default;
};

/// Filler words without clues get this placeholder.
inline std::string placeholder_clue(const std::string& surface) { return "Define: " + surface; }

/// Turns a successful fill into a puzzle. Each entry's clue is drawn uniformly
/// from its clue list using a per-slot stream derived from clue_seed.
inline Puzzle assemble(const GridPattern& pattern, const SlotSet& slots, const FillResult& result,
                       const Lexicon& lexicon, Seed clue_seed, Seed solver_seed = 0) {
  if (!result.success()) throw Error(ErrorCode::InvalidConfig, "cannot assemble a puzzle from a failed fill");
  if (result.assignment.size() != slots.size()) {
    throw Error(ErrorCode::MissingEntry, "assignment does not cover every slot");
  }
  Puzzle p;
  p.pattern = pattern;
  int topic = 0;
  for (const auto& slot : slots.slots()) {
    EntryId id = result.assignment[static_cast<size_t>(slot.id)];
    if (id >= lexicon.size()) {
      throw Error(ErrorCode::MissingEntry, "slot " + std::to_string(slot.id) + " refers to an unknown entry");
    }
    const auto& e = lexicon[id];
    if (e.length() != slot.length) {
      throw Error(ErrorCode::MissingEntry, "slot " + std::to_string(slot.id) + " holds a word of the wrong length");
    }
    PuzzleEntry pe;
    pe.slot_id = slot.id;
    pe.orientation = slot.orientation;
    pe.row = slot.start.row;
    pe.col = slot.start.col;
    pe.length = slot.length;
    pe.answer = e.answer;
    pe.surface = e.surface;
    pe.source = e.source;
    if (e.clues.empty()) {
      pe.clue = placeholder_clue(e.surface);
    } else {
      Rng rng(derive_seed(clue_seed, {static_cast<std::uint64_t>(slot.id)}));
      pe.clue = e.clues[uniform_below(rng, e.clues.size())];
    }
    topic += e.source == Source::Topic ? 1 : 0;
    p.entries.push_back(std::move(pe));
  }
  p.metadata.target_rate = result.target_rate;
  p.metadata.achieved_topic_ratio = slots.empty() ? 0.0 : static_cast<double>(topic) / static_cast<double>(slots.size());
  p.metadata.seed = solver_seed;
  p.metadata.elapsed_ms = result.elapsed.count();
  p.metadata.restarts = result.restarts;
  p.metadata.nodes_expanded = result.nodes_expanded;
  return p;
}

// ---------------------------------------------------------------------------
// Verification. Deliberately re-derives slot runs and letters from scratch.

enum class PuzzleViolationKind {
  SlotCoverage,
  LengthMismatch,
  CrossingConflict,
  NotInLexicon,
  SourceMismatch,
  DuplicateAnswer,
  QuotaShortfall,
};

inline const char* to_string(PuzzleViolationKind k) {
  switch (k) {
    case PuzzleViolationKind::SlotCoverage: return "slot-coverage";
    case PuzzleViolationKind::LengthMismatch: return "length-mismatch";
    case PuzzleViolationKind::CrossingConflict: return "crossing-conflict";
    case PuzzleViolationKind::NotInLexicon: return "not-in-lexicon";
    case PuzzleViolationKind::SourceMismatch: return "source-mismatch";
    case PuzzleViolationKind::DuplicateAnswer: return "duplicate-answer";
    case PuzzleViolationKind::QuotaShortfall: return "quota-shortfall";
  }
  return "unknown";
}

struct PuzzleViolation {
  PuzzleViolationKind kind;
  std::string detail;
};

struct VerificationReport {
  std::vector<PuzzleViolation> violations;

  bool ok() const { return violations.empty(); }
  size_t count(PuzzleViolationKind k) const {
    return static_cast<size_t>(std::count_if(violations.begin(), violations.end(),
                                             [k](const PuzzleViolation& v) { return v.kind == k; }));
  }
};

struct VerifyOptions {
  int min_slot_length = 2;
  bool forbid_duplicate_answers = true;
};

inline VerificationReport verify_puzzle(const Puzzle& puzzle, const Lexicon& lexicon, int target_rate,
                                        const VerifyOptions& options = {}) {
  VerificationReport report;
  auto add = [&](PuzzleViolationKind k, std::string d) { report.violations.push_back({k, std::move(d)}); };
  const auto& g = puzzle.pattern;

  // (orientation, row, col) -> run length
  std::map<std::tuple<int, int, int>, int> runs;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (!g.is_white(r, c)) continue;
      if (!g.is_white(r, c - 1)) {
        int len = 0;
        while (g.is_white(r, c + len)) ++len;
        if (len >= options.min_slot_length) runs[{0, r, c}] = len;
      }
      if (!g.is_white(r - 1, c)) {
        int len = 0;
        while (g.is_white(r + len, c)) ++len;
        if (len >= options.min_slot_length) runs[{1, r, c}] = len;
      }
    }
  }

  std::map<std::tuple<int, int, int>, int> covered;
  std::vector<char32_t> letters(static_cast<size_t>(g.height()) * g.width(), 0);
  std::set<size_t> conflict_cells;
  std::map<std::string, int> answer_uses;
  int topic = 0;
  for (const auto& e : puzzle.entries) {
    const int o = e.orientation == Orientation::Across ? 0 : 1;
    const std::string where = std::string(to_string(e.orientation)) + " (" + std::to_string(e.row) + "," +
                              std::to_string(e.col) + ")";
    auto run = runs.find({o, e.row, e.col});
    if (run == runs.end()) {
      add(PuzzleViolationKind::SlotCoverage, "entry at " + where + " does not start a slot");
      continue;
    }
    if (++covered[run->first] > 1) add(PuzzleViolationKind::SlotCoverage, "slot " + where + " filled twice");
    auto word = utf8::decode(e.answer);
    if (static_cast<int>(word.size()) != run->second) {
      add(PuzzleViolationKind::LengthMismatch, where + ": '" + e.answer + "' does not have length " +
                                                   std::to_string(run->second));
    }
    const int n = std::min(static_cast<int>(word.size()), run->second);
    for (int k = 0; k < n; ++k) {
      int r = e.row + (o == 1 ? k : 0);
      int c = e.col + (o == 0 ? k : 0);
      auto idx = static_cast<size_t>(r) * g.width() + c;
      if (letters[idx] == 0) {
        letters[idx] = word[static_cast<size_t>(k)];
      } else if (letters[idx] != word[static_cast<size_t>(k)] && conflict_cells.insert(idx).second) {
        add(PuzzleViolationKind::CrossingConflict, "letters disagree at (" + std::to_string(r) + "," +
                                                       std::to_string(c) + ")");
      }
    }
    const auto* lex = lexicon.find(e.answer);
    if (!lex) {
      add(PuzzleViolationKind::NotInLexicon, "'" + e.answer + "' is not in the lexicon");
    } else if (lex->source != e.source) {
      add(PuzzleViolationKind::SourceMismatch, "'" + e.answer + "' is tagged " + to_string(e.source) +
                                                   " but the lexicon says " + to_string(lex->source));
    }
    if (++answer_uses[e.answer] == 2 && options.forbid_duplicate_answers) {
      add(PuzzleViolationKind::DuplicateAnswer, "'" + e.answer + "' is used more than once");
    }
    topic += e.source == Source::Topic ? 1 : 0;
  }
  for (const auto& [key, len] : runs) {
    if (!covered.count(key)) {
      add(PuzzleViolationKind::SlotCoverage, std::string(std::get<0>(key) == 0 ? "across" : "down") + " slot at (" +
                                                 std::to_string(std::get<1>(key)) + "," +
                                                 std::to_string(std::get<2>(key)) + ") has no entry");
    }
  }
  const auto total = static_cast<long>(puzzle.entries.size());
  if (topic * 100L < static_cast<long>(target_rate) * total) {
    add(PuzzleViolationKind::QuotaShortfall, std::to_string(topic) + "/" + std::to_string(total) +
                                                 " topic answers is below " + std::to_string(target_rate) + "%");
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON and text output.

inline nlohmann::json to_json(const Puzzle& p, bool include_solution = true) {
  nlohmann::json doc;
  GridPattern bare = p.pattern;
  bare.set_id({});
  doc["pattern"] = render_pattern(bare);
  doc["pattern_id"] = p.pattern.id();
  auto entries = nlohmann::json::array();
  for (const auto& e : p.entries) {
    nlohmann::json j;
    j["slot_id"] = e.slot_id;
    j["orientation"] = to_string(e.orientation);
    j["row"] = e.row;
    j["col"] = e.col;
    j["length"] = e.length;
    if (include_solution) {
      j["answer"] = e.answer;
      j["surface"] = e.surface;
    }
    j["source"] = to_string(e.source);
    j["clue"] = e.clue;
    entries.push_back(std::move(j));
  }
  doc["entries"] = std::move(entries);
  const auto& m = p.metadata;
  doc["metadata"] = {{"T_requested", m.target_rate},
                     {"achieved_topic_ratio", m.achieved_topic_ratio},
                     {"seed", m.seed},
                     {"elapsed_ms", m.elapsed_ms},
                     {"restarts", m.restarts},
                     {"nodes_expanded", m.nodes_expanded},
                     {"generator_version", m.generator_version}};
  return doc;
}

inline std::string serialize_puzzle(const Puzzle& p, bool include_solution = true) {
  return to_json(p, include_solution).dump(2) + "\n";
}

inline Puzzle puzzle_from_json(const nlohmann::json& doc) {
  try {
    Puzzle p;
    p.pattern = parse_pattern(doc.at("pattern").get<std::string>());
    if (doc.contains("pattern_id")) p.pattern.set_id(doc["pattern_id"].get<std::string>());
    for (const auto& j : doc.at("entries")) {
      PuzzleEntry e;
      e.slot_id = j.at("slot_id").get<int>();
      const auto o = j.at("orientation").get<std::string>();
      if (o != "across" && o != "down") throw Error(ErrorCode::ParseError, "bad orientation '" + o + "'");
      e.orientation = o == "across" ? Orientation::Across : Orientation::Down;
      e.row = j.at("row").get<int>();
      e.col = j.at("col").get<int>();
      e.length = j.at("length").get<int>();
      if (j.contains("answer")) e.answer = j["answer"].get<std::string>();
      if (j.contains("surface")) e.surface = j["surface"].get<std::string>();
      e.source = parse_source(j.at("source").get<std::string>());
      e.clue = j.at("clue").get<std::string>();
      p.entries.push_back(std::move(e));
    }
    const auto& m = doc.at("metadata");
    p.metadata.target_rate = m.at("T_requested").get<int>();
    p.metadata.achieved_topic_ratio = m.at("achieved_topic_ratio").get<double>();
    p.metadata.seed = m.at("seed").get<Seed>();
    p.metadata.elapsed_ms = m.at("elapsed_ms").get<std::int64_t>();
    p.metadata.restarts = m.at("restarts").get<std::uint64_t>();
    p.metadata.nodes_expanded = m.value("nodes_expanded", std::uint64_t{0});
    p.metadata.generator_version = m.at("generator_version").get<std::string>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("puzzle JSON: ") + e.what());
  }
}

inline Puzzle parse_puzzle(const std::string& text) {
  try {
    return puzzle_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("puzzle JSON: ") + e.what());
  }
}

/// Letter grid ('#' for black, '.' for unfilled or hidden cells) followed by
/// ACROSS and DOWN clue lists numbered slot_id + 1.
inline std::string render_text(const Puzzle& p, bool show_solution = true) {
  const auto& g = p.pattern;
  std::vector<std::string> cells(static_cast<size_t>(g.height()) * g.width(), ".");
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (!g.is_white(r, c)) cells[g.index(r, c)] = "#";
    }
  }
  if (show_solution) {
    for (const auto& e : p.entries) {
      auto word = utf8::decode(e.answer);
      for (size_t k = 0; k < word.size(); ++k) {
        int r = e.row + (e.orientation == Orientation::Down ? static_cast<int>(k) : 0);
        int c = e.col + (e.orientation == Orientation::Across ? static_cast<int>(k) : 0);
        if (g.is_white(r, c)) cells[g.index(r, c)] = utf8::encode(word[k]);
      }
    }
  }
  std::ostringstream out;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) out << cells[g.index(r, c)];
    out << "\n";
  }
  auto sorted = p.entries;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.slot_id < b.slot_id; });
  for (auto o : {Orientation::Across, Orientation::Down}) {
    out << "\n" << (o == Orientation::Across ? "ACROSS" : "DOWN") << "\n";
    for (const auto& e : sorted) {
      if (e.orientation != o) continue;
      out << (e.slot_id + 1) << ". " << e.clue << " (" << e.length << ")\n";
    }
  }
  return out.str();
}

}  // namespace xwgen
