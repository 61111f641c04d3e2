#pragma once

#include <set>
#include <string>
#include <vector>

#include "xwgen/grid.hpp"
#include "xwgen/lexicon.hpp"
#include "xwgen/rng.hpp"

namespace xwgen::testing {

struct SmallInstance {
  GridPattern pattern;
  Lexicon lexicon;
  bool planted = false;
};

/// Random valid pattern up to 5x5 with 0..8 black cells, plus a lexicon of at
/// most 60 words over "ABCDE". About half the instances get a planted fill so
/// both satisfiable and unsatisfiable cases show up.
inline SmallInstance make_small_instance(Seed seed) {
  Rng rng(seed);
  SmallInstance inst;
  for (;;) {
    int h = 2 + static_cast<int>(uniform_below(rng, 4));
    int w = 2 + static_cast<int>(uniform_below(rng, 4));
    int max_black = std::min(8, h * w - 2);
    int black = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_black) + 1));
    try {
      inst.pattern = generate_random_patterns(h, w, black, 1, {}, rng(), 2000).front();
      if (!extract_slots(inst.pattern).empty()) break;
    } catch (const Error&) {
    }
  }
  const auto slots = extract_slots(inst.pattern);
  const std::string alphabet = "ABCDE";
  std::set<std::string> words;
  std::set<std::string> topic;
  auto tag = [&](const std::string& w) {
    if (uniform_below(rng, 2) == 0) topic.insert(w);
  };

  inst.planted = uniform_below(rng, 2) == 0;
  if (inst.planted) {
    std::vector<char> letters(static_cast<size_t>(inst.pattern.height() * inst.pattern.width()));
    for (auto& c : letters) c = alphabet[uniform_below(rng, alphabet.size())];
    for (const auto& s : slots.slots()) {
      std::string w;
      for (auto p : s.cells) w.push_back(letters[inst.pattern.index(p.row, p.col)]);
      words.insert(w);
      tag(w);
    }
  }
  const size_t target = std::min<size_t>(60, words.size() + 4 + uniform_below(rng, 40));
  std::vector<int> lengths;
  for (const auto& s : slots.slots()) lengths.push_back(s.length);
  size_t guard = 0;
  while (words.size() < target && guard++ < 10000) {
    int len = lengths[uniform_below(rng, lengths.size())];
    std::string w;
    for (int i = 0; i < len; ++i) w.push_back(alphabet[uniform_below(rng, alphabet.size())]);
    if (words.insert(w).second) tag(w);
  }
  std::vector<LexiconEntry> entries;
  for (const auto& w : words) {
    LexiconEntry e;
    e.answer = w;
    e.surface = w;
    e.source = topic.count(w) ? Source::Topic : Source::Filler;
    entries.push_back(std::move(e));
  }
  inst.lexicon = Lexicon::from_entries(std::move(entries));
  return inst;
}

}  // namespace xwgen::testing
