// Fills a small grid from an in-memory lexicon and prints the puzzle.
#include <iostream>

#include "xwgen/xwgen.hpp"

int main() {
  using namespace xwgen;
  auto pattern = parse_pattern("...\n.#.\n...\n");

  std::vector<RawEntry> raw = {
      {"Ant", Source::Topic, {"Tiny [Answer] colony found under the new stadium."}},
      {"tan", Source::Filler, {}},
      {"toe", Source::Filler, {}},
      {"nee", Source::Filler, {}},
      {"eon", Source::Filler, {}},
      {"act", Source::Filler, {}},
      {"the", Source::Filler, {}},
  };
  auto lexicon = Lexicon::build(raw, NormalizationTable::latin());
  WordIndex index(lexicon);
  auto slots = extract_slots(pattern);

  auto config = SolverConfig::exhaustive(25);
  auto result = solve(slots, index, config);
  if (!result.success()) {
    std::cerr << "no fill: " << to_string(result.status) << "\n";
    return 1;
  }
  auto puzzle = assemble(pattern, slots, result, lexicon, /*clue_seed=*/1);
  std::cout << render_text(puzzle, true);
  return 0;
}
