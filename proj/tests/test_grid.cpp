#include <gtest/gtest.h>

#include <map>
#include <set>

#include "xwgen/grid.hpp"

using namespace xwgen;

namespace {

// Second, deliberately naive run scanner used as the oracle for extract_slots.
struct NaiveRun {
  int orientation;
  int row, col, length;
  friend auto operator<=>(const NaiveRun&, const NaiveRun&) = default;
};

std::set<NaiveRun> naive_runs(const GridPattern& g, int min_len) {
  std::set<NaiveRun> out;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (!g.is_white(r, c)) continue;
      if (!g.is_white(r, c - 1)) {
        int len = 0;
        while (g.is_white(r, c + len)) ++len;
        if (len >= min_len) out.insert({0, r, c, len});
      }
      if (!g.is_white(r - 1, c)) {
        int len = 0;
        while (g.is_white(r + len, c)) ++len;
        if (len >= min_len) out.insert({1, r, c, len});
      }
    }
  }
  return out;
}

GridPattern random_pattern(Rng& rng) {
  int h = 1 + static_cast<int>(uniform_below(rng, 8));
  int w = 1 + static_cast<int>(uniform_below(rng, 8));
  auto g = GridPattern::all_white(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (uniform_below(rng, 100) < 30) g.set(r, c, Cell::Black);
    }
  }
  return g;
}

}  // namespace

TEST(ParsePattern, SmallestAllWhite) {
  auto g = parse_pattern("..\n..");
  EXPECT_EQ(g.height(), 2);
  EXPECT_EQ(g.width(), 2);
  EXPECT_EQ(g.black_count(), 0);
}

TEST(ParsePattern, DiagonalBlacks) {
  auto g = parse_pattern("#.\n.#");
  EXPECT_EQ(g.at(0, 0), Cell::Black);
  EXPECT_EQ(g.at(1, 1), Cell::Black);
  EXPECT_EQ(g.at(0, 1), Cell::White);
  EXPECT_EQ(g.at(1, 0), Cell::White);
}

TEST(ParsePattern, SevenBySevenWithElevenBlacks) {
  auto g = parse_pattern(
      "...#...\n"
      ".#...#.\n"
      "...#...\n"
      "#.....#\n"
      "...#...\n"
      ".#...#.\n"
      "...#...\n");
  EXPECT_EQ(g.height(), 7);
  EXPECT_EQ(g.width(), 7);
  EXPECT_EQ(g.black_count(), 10);
  g.set(3, 3, Cell::Black);
  EXPECT_EQ(g.black_count(), 11);
}

TEST(ParsePattern, Errors) {
  auto code = [](const std::string& text) {
    try {
      parse_pattern(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;  // sentinel: no error
  };
  EXPECT_EQ(code("..\n."), ErrorCode::RaggedRows);
  EXPECT_EQ(code(""), ErrorCode::EmptyInput);
  EXPECT_EQ(code("\n\n"), ErrorCode::EmptyInput);
  EXPECT_EQ(code(".x\n.."), ErrorCode::IllegalCharacter);
}

TEST(ParsePattern, IdLineAndMultiFile) {
  auto list = parse_pattern_file("id: a\n..\n..\n\nid: b\n#.\n");
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].id(), "a");
  EXPECT_EQ(list[1].id(), "b");
  EXPECT_EQ(list[1].height(), 1);
  EXPECT_EQ(parse_pattern_file(render_pattern_file(list)), list);
}

TEST(ExtractSlots, SingleRun) {
  auto s = extract_slots(GridPattern::all_white(1, 5));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.slot(0).orientation, Orientation::Across);
  EXPECT_EQ(s.slot(0).length, 5);
  EXPECT_TRUE(s.crossings().empty());
}

TEST(ExtractSlots, AllBlack) {
  GridPattern g = GridPattern::all_white(7, 7);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 7; ++c) g.set(r, c, Cell::Black);
  EXPECT_EQ(extract_slots(g).size(), 0u);
}

TEST(ExtractSlots, TwoByTwo) {
  auto s = extract_slots(parse_pattern("..\n.."));
  ASSERT_EQ(s.size(), 4u);
  int across = 0, down = 0;
  for (const auto& slot : s.slots()) {
    EXPECT_EQ(slot.length, 2);
    (slot.orientation == Orientation::Across ? across : down)++;
  }
  EXPECT_EQ(across, 2);
  EXPECT_EQ(down, 2);
  EXPECT_EQ(s.crossings().size(), 4u);
  // Canonical order: Across row-major, then Down.
  EXPECT_EQ(s.slot(0).start, (Position{0, 0}));
  EXPECT_EQ(s.slot(1).start, (Position{1, 0}));
  EXPECT_EQ(s.slot(2).start, (Position{0, 0}));
  EXPECT_EQ(s.slot(3).start, (Position{0, 1}));
  EXPECT_EQ(s.slot(2).orientation, Orientation::Down);
}

TEST(ExtractSlots, MatchesNaiveScannerOnRandomPatterns) {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    auto g = random_pattern(rng);
    PatternPolicy policy;
    policy.min_slot_length = 2 + static_cast<int>(uniform_below(rng, 2));
    auto s = extract_slots(g, policy);
    std::set<NaiveRun> got;
    for (const auto& slot : s.slots()) {
      got.insert({slot.orientation == Orientation::Across ? 0 : 1, slot.start.row, slot.start.col, slot.length});
    }
    ASSERT_EQ(got, naive_runs(g, policy.min_slot_length)) << render_pattern(g);
    for (size_t k = 0; k < s.size(); ++k) ASSERT_EQ(s.slot(static_cast<int>(k)).id, static_cast<int>(k));
  }
}

TEST(ExtractSlots, InvariantsOnValidPatterns) {
  Rng rng(7);
  int checked = 0;
  while (checked < 300) {
    auto g = random_pattern(rng);
    if (!validate_pattern(g).valid()) continue;
    ++checked;
    auto s = extract_slots(g);
    std::map<Position, int> membership;
    int across_len = 0, down_len = 0;
    for (const auto& slot : s.slots()) {
      for (auto p : slot.cells) membership[p]++;
      (slot.orientation == Orientation::Across ? across_len : down_len) += slot.length;
    }
    std::map<Position, int> crossing_count;
    for (const auto& x : s.crossings()) crossing_count[x.cell]++;
    for (int r = 0; r < g.height(); ++r) {
      for (int c = 0; c < g.width(); ++c) {
        if (!g.is_white(r, c)) continue;
        Position p{r, c};
        ASSERT_GE(membership[p], 1);
        ASSERT_LE(membership[p], 2);
        ASSERT_EQ(crossing_count[p], membership[p] == 2 ? 1 : 0);
        ASSERT_EQ(s.slots_at(p).size(), static_cast<size_t>(membership[p]));
      }
    }
    int naive_across = 0, naive_down = 0;
    for (const auto& run : naive_runs(g, 2)) (run.orientation == 0 ? naive_across : naive_down) += run.length;
    EXPECT_EQ(across_len, naive_across);
    EXPECT_EQ(down_len, naive_down);
  }
}

TEST(ValidatePattern, Examples) {
  EXPECT_TRUE(validate_pattern(parse_pattern("..\n..")).valid());
  EXPECT_TRUE(validate_pattern(parse_pattern("..")).valid());

  auto report = validate_pattern(parse_pattern(".#.\n#.#\n.#."));
  ASSERT_FALSE(report.valid());
  bool center = false;
  for (const auto& v : report.violations) {
    if (v.kind == ViolationKind::UncoveredWhiteCell && v.cell == Position{1, 1}) center = true;
  }
  EXPECT_TRUE(center);
}

TEST(ValidatePattern, ConnectivityIsOptIn) {
  auto g = parse_pattern("..#..\n..#..");
  EXPECT_TRUE(validate_pattern(g).valid());
  PatternPolicy strict;
  strict.require_connected = true;
  auto report = validate_pattern(g, strict);
  ASSERT_FALSE(report.valid());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::Disconnected);
}

TEST(ValidatePattern, AllBlackHasNoWhiteCells) {
  auto report = validate_pattern(parse_pattern("##\n##"));
  ASSERT_FALSE(report.valid());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::NoWhiteCells);
}

TEST(RandomPatterns, SevenBySevenNineBlacks) {
  auto list = generate_random_patterns(7, 7, 9, 10, {}, 42);
  ASSERT_EQ(list.size(), 10u);
  std::set<std::string> distinct;
  for (const auto& p : list) {
    EXPECT_EQ(p.black_count(), 9);
    EXPECT_TRUE(validate_pattern(p).valid());
    distinct.insert(render_pattern(p));
  }
  EXPECT_EQ(distinct.size(), 10u);
  EXPECT_EQ(render_pattern_file(list), render_pattern_file(generate_random_patterns(7, 7, 9, 10, {}, 42)));
}

TEST(RandomPatterns, OnlyZeroBlackPattern) {
  auto list = generate_random_patterns(2, 2, 0, 1, {}, 3);
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(render_pattern(list[0]).substr(render_pattern(list[0]).find('\n') + 1), "..\n..");
}

TEST(RandomPatterns, Errors) {
  EXPECT_THROW(generate_random_patterns(2, 2, 4, 1, {}, 1), Error);
  EXPECT_THROW(generate_random_patterns(2, 2, 0, 0, {}, 1), Error);
  try {
    generate_random_patterns(2, 2, 0, 2, {}, 1, 1000);  // only one such pattern exists
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ExhaustedAttempts);
  }
}

TEST(RenderPattern, Examples) {
  EXPECT_EQ(render_pattern(parse_pattern("..\n..")), "..\n..");
  EXPECT_EQ(render_pattern(parse_pattern("#.")), "#.");
}

TEST(RenderPattern, RoundTripGenerated) {
  for (int black = 9; black <= 12; ++black) {
    for (const auto& p : generate_random_patterns(7, 7, black, 10, {}, static_cast<Seed>(black))) {
      EXPECT_EQ(parse_pattern(render_pattern(p)), p);
    }
  }
}
