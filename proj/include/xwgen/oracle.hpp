#pragma once

#include <cstdint>
#include <vector>

#include "xwgen/error.hpp"
#include "xwgen/grid.hpp"
#include "xwgen/word_index.hpp"

namespace xwgen {

struct BruteForceResult {
  bool satisfiable = false;
  std::vector<EntryId> assignment;
  std::uint64_t nodes = 0;
};

/// Exhaustive reference search for small instances. Slots are filled in id
/// order, each trying every lexicon word of its length in lexicon order.
/// Only letter consistency (and the duplicate rule) cuts branches; the quota
/// is checked on complete fills. Throws InstanceTooLarge past `node_cap`.
inline BruteForceResult brute_force_solve(const SlotSet& slots, const WordIndex& index, int target_rate,
                                          bool forbid_duplicates = true,
                                          std::uint64_t node_cap = 500'000'000) {
  const Lexicon& lex = index.lexicon();
  const size_t n = slots.size();
  std::vector<std::vector<EntryId>> lists(n);
  for (size_t s = 0; s < n; ++s) {
    for (EntryId id = 0; id < lex.size(); ++id) {
      if (lex[id].length() == slots.slot(static_cast<int>(s)).length) lists[s].push_back(id);
    }
  }
  std::vector<char32_t> grid(static_cast<size_t>(slots.height()) * slots.width(), 0);
  std::vector<int> depth(grid.size(), 0);
  std::vector<char> used(lex.size(), 0);
  std::vector<EntryId> chosen(n, 0);
  BruteForceResult result;

  auto at = [&](Position p) { return static_cast<size_t>(p.row) * slots.width() + p.col; };

  // Iterative enumeration with an explicit cursor per slot.
  std::vector<size_t> cursor(n, 0);
  size_t s = 0;
  if (n == 0) return result;
  while (true) {
    const auto& slot = slots.slot(static_cast<int>(s));
    bool placed = false;
    while (cursor[s] < lists[s].size()) {
      EntryId id = lists[s][cursor[s]++];
      if (forbid_duplicates && used[id]) continue;
      if (++result.nodes > node_cap) throw Error(ErrorCode::InstanceTooLarge, "brute-force node cap exceeded");
      const auto& w = lex[id].letters;
      bool ok = true;
      for (int k = 0; k < slot.length && ok; ++k) {
        char32_t c = grid[at(slot.cells[static_cast<size_t>(k)])];
        ok = (c == 0 || c == w[static_cast<size_t>(k)]);
      }
      if (!ok) continue;
      for (int k = 0; k < slot.length; ++k) {
        auto c = at(slot.cells[static_cast<size_t>(k)]);
        if (depth[c]++ == 0) grid[c] = w[static_cast<size_t>(k)];
      }
      used[id] = 1;
      chosen[s] = id;
      placed = true;
      break;
    }
    if (placed) {
      if (s + 1 == n) {
        int topic = 0;
        for (size_t i = 0; i < n; ++i) topic += lex[chosen[i]].source == Source::Topic ? 1 : 0;
        if (topic * 100 >= target_rate * static_cast<int>(n)) {
          result.satisfiable = true;
          result.assignment = chosen;
          return result;
        }
        // Reject this leaf and keep enumerating the same slot.
        for (int k = 0; k < slot.length; ++k) {
          auto c = at(slot.cells[static_cast<size_t>(k)]);
          if (--depth[c] == 0) grid[c] = 0;
        }
        used[chosen[s]] = 0;
        continue;
      }
      ++s;
      cursor[s] = 0;
      continue;
    }
    // Slot s ran out of words: step back.
    if (s == 0) return result;
    --s;
    const auto& prev = slots.slot(static_cast<int>(s));
    for (int k = 0; k < prev.length; ++k) {
      auto c = at(prev.cells[static_cast<size_t>(k)]);
      if (--depth[c] == 0) grid[c] = 0;
    }
    used[chosen[s]] = 0;
  }
}

}  // namespace xwgen
