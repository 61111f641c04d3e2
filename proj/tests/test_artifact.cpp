#include <gtest/gtest.h>

#include "support/synthetic.hpp"
#include "xwgen/artifact.hpp"

using namespace xwgen;

namespace {

struct Solved {
  GridPattern pattern;
  Lexicon lexicon;
  SlotSet slots;
  FillResult result;
};

Solved two_by_two(Source s = Source::Filler) {
  Solved out;
  out.pattern = parse_pattern("..\n..");
  out.lexicon = Lexicon::build({{"AB", s, {}}, {"CD", s, {}}, {"AC", s, {}}, {"BD", s, {}}}, NormalizationTable::latin());
  out.slots = extract_slots(out.pattern);
  WordIndex index(out.lexicon);
  out.result = solve(out.slots, index, SolverConfig::exhaustive(0));
  return out;
}

}  // namespace

TEST(Assemble, PlaceholderAndMetadata) {
  auto s = two_by_two();
  auto p = assemble(s.pattern, s.slots, s.result, s.lexicon, 5, 77);
  ASSERT_EQ(p.entries.size(), 4u);
  EXPECT_EQ(p.entries[0].clue, "Define: AB");
  EXPECT_EQ(p.metadata.seed, 77u);
  EXPECT_EQ(p.metadata.generator_version, kGeneratorVersion);
  EXPECT_DOUBLE_EQ(p.metadata.achieved_topic_ratio, 0.0);
}

TEST(Assemble, SeededClueChoice) {
  auto g = parse_pattern("..");
  auto lex = Lexicon::build({{"AB", Source::Topic, {"first [Answer]", "second [Answer]"}}}, NormalizationTable::latin());
  WordIndex index(lex);
  auto slots = extract_slots(g);
  auto r = solve(slots, index, SolverConfig::exhaustive(100));
  auto first = assemble(g, slots, r, lex, 123).entries[0].clue;
  for (int i = 0; i < 5; ++i) EXPECT_EQ(assemble(g, slots, r, lex, 123).entries[0].clue, first);
  std::set<std::string> seen;
  for (Seed seed = 0; seed < 64; ++seed) seen.insert(assemble(g, slots, r, lex, seed).entries[0].clue);
  EXPECT_EQ(seen.size(), 2u);
}

TEST(Assemble, MissingEntry) {
  auto s = two_by_two();
  s.result.assignment[1] = 999;
  try {
    assemble(s.pattern, s.slots, s.result, s.lexicon, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingEntry);
  }
}

TEST(Assemble, AcrossAndDownEntries) {
  // LIBERAL across, ROOMBA down through its R.
  auto g = parse_pattern(".......\n####.##\n####.##\n####.##\n####.##\n####.##");
  auto table = NormalizationTable::latin();
  auto lex = Lexicon::build(
      {
          {"Roomba", Source::Topic, {"[Answer] sales rose."}},
          {"liberal", Source::Topic,
           {"U.S. media coverage of the election was divided between [Answer] and conservative media."}},
      },
      table);
  WordIndex index(lex);
  auto slots = extract_slots(g);
  ASSERT_EQ(slots.size(), 2u);
  auto r = solve(slots, index, SolverConfig::exhaustive(100));
  ASSERT_TRUE(r.success());
  auto p = assemble(g, slots, r, lex, 1);
  EXPECT_EQ(p.entries[0].answer, "LIBERAL");
  EXPECT_EQ(p.entries[1].answer, "ROOMBA");
  EXPECT_EQ(p.entries[1].surface, "Roomba");
  EXPECT_NE(p.entries[0].clue.find("between [Answer] and conservative"), std::string::npos);
  EXPECT_TRUE(verify_puzzle(p, lex, 100).ok());
}

TEST(Verify, SolverPuzzlesPass) {
  xwgen::testing::SyntheticLexiconSpec spec{.filler = 4000, .topic = 80, .seed = 31};
  auto lex = xwgen::testing::make_synthetic_lexicon(spec);
  WordIndex index(lex);
  int verified = 0;
  for (Seed seed = 0; seed < 200 && verified < 100; ++seed) {
    auto g = generate_random_patterns(5 + static_cast<int>(seed % 3), 5 + static_cast<int>(seed % 3),
                                      4 + static_cast<int>(seed % 5), 1, {}, seed).front();
    auto slots = extract_slots(g);
    SolverConfig c;
    c.target_rate = static_cast<int>(seed % 4) * 10;
    c.node_budget = 5000;
    c.time_limit = Millis(40'000);
    c.seed = seed;
    auto r = solve(slots, index, c);
    if (!r.success()) continue;
    auto p = assemble(g, slots, r, lex, seed);
    auto report = verify_puzzle(p, lex, c.target_rate);
    ASSERT_TRUE(report.ok()) << report.violations.front().detail;
    ++verified;
  }
  EXPECT_GE(verified, 100);
}

TEST(Verify, OneCorruptedCrossing) {
  auto s = two_by_two();
  auto p = assemble(s.pattern, s.slots, s.result, s.lexicon, 1);
  ASSERT_TRUE(verify_puzzle(p, s.lexicon, 0).ok());
  // Across row 0 becomes "AD": crossing at (0,1) now disagrees with down col 1 ("BD").
  auto lex = Lexicon::build({{"AB", Source::Filler, {}}, {"CD", Source::Filler, {}}, {"AC", Source::Filler, {}},
                             {"BD", Source::Filler, {}}, {"AD", Source::Filler, {}}},
                            NormalizationTable::latin());
  p.entries[0].answer = "AD";
  auto report = verify_puzzle(p, lex, 0);
  EXPECT_EQ(report.count(PuzzleViolationKind::CrossingConflict), 1u);
  EXPECT_EQ(report.violations.size(), 1u);
}

TEST(Verify, QuotaShortfall) {
  // Five 2-letter slots, two of them Topic: ratio 0.4.
  auto g = parse_pattern("..#..#..#..#..");
  std::vector<RawEntry> raw{{"AA", Source::Topic, {}}, {"BB", Source::Topic, {}}, {"CC", Source::Filler, {}},
                            {"DD", Source::Filler, {}}, {"EE", Source::Filler, {}}};
  auto lex = Lexicon::build(raw, NormalizationTable::latin());
  WordIndex index(lex);
  auto slots = extract_slots(g);
  auto r = solve(slots, index, SolverConfig::exhaustive(40));
  ASSERT_TRUE(r.success());
  auto p = assemble(g, slots, r, lex, 1);
  EXPECT_DOUBLE_EQ(p.metadata.achieved_topic_ratio, 0.4);
  EXPECT_TRUE(verify_puzzle(p, lex, 40).ok());
  auto report = verify_puzzle(p, lex, 50);
  EXPECT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.count(PuzzleViolationKind::QuotaShortfall), 1u);
}

TEST(Verify, OtherViolations) {
  auto s = two_by_two();
  auto p = assemble(s.pattern, s.slots, s.result, s.lexicon, 1);

  auto dropped = p;
  dropped.entries.pop_back();
  EXPECT_EQ(verify_puzzle(dropped, s.lexicon, 0).count(PuzzleViolationKind::SlotCoverage), 1u);

  auto unknown = p;
  unknown.entries[0].answer = "ZZ";
  EXPECT_GE(verify_puzzle(unknown, s.lexicon, 0).count(PuzzleViolationKind::NotInLexicon), 1u);

  auto relabeled = p;
  relabeled.entries[0].source = Source::Topic;
  EXPECT_EQ(verify_puzzle(relabeled, s.lexicon, 0).count(PuzzleViolationKind::SourceMismatch), 1u);

  auto longer = p;
  longer.entries[0].answer = "ABC";
  EXPECT_GE(verify_puzzle(longer, s.lexicon, 0).count(PuzzleViolationKind::LengthMismatch), 1u);
}

TEST(Verify, DuplicateAnswers) {
  auto g = parse_pattern("..#..");
  auto lex = Lexicon::build({{"AB", Source::Filler, {}}}, NormalizationTable::latin());
  WordIndex index(lex);
  auto slots = extract_slots(g);
  auto c = SolverConfig::exhaustive(0);
  c.forbid_duplicate_answers = false;
  auto r = solve(slots, index, c);
  ASSERT_TRUE(r.success());
  auto p = assemble(g, slots, r, lex, 1);
  EXPECT_EQ(verify_puzzle(p, lex, 0).count(PuzzleViolationKind::DuplicateAnswer), 1u);
  EXPECT_TRUE(verify_puzzle(p, lex, 0, {2, false}).ok());
}

TEST(Json, RoundTrip) {
  xwgen::testing::SyntheticLexiconSpec spec{.filler = 3000, .topic = 100, .seed = 2};
  auto lex = xwgen::testing::make_synthetic_lexicon(spec);
  WordIndex index(lex);
  auto g = generate_random_patterns(7, 7, 12, 1, {}, 8).front();
  auto slots = extract_slots(g);
  SolverConfig c;
  c.target_rate = 10;
  c.node_budget = 20000;
  c.seed = 4;
  auto r = solve(slots, index, c);
  ASSERT_TRUE(r.success());
  auto p = assemble(g, slots, r, lex, 9, c.seed);
  auto text = serialize_puzzle(p);
  auto back = parse_puzzle(text);
  EXPECT_EQ(back, p);
  EXPECT_EQ(serialize_puzzle(back), text);

  auto j = nlohmann::json::parse(text);
  for (const char* key : {"T_requested", "achieved_topic_ratio", "seed", "elapsed_ms", "restarts", "generator_version"}) {
    EXPECT_TRUE(j["metadata"].contains(key)) << key;
  }
  for (const char* key : {"slot_id", "orientation", "row", "col", "answer", "surface", "source", "clue"}) {
    EXPECT_TRUE(j["entries"][0].contains(key)) << key;
  }

  auto hidden = nlohmann::json::parse(serialize_puzzle(p, false));
  EXPECT_FALSE(hidden["entries"][0].contains("answer"));
  EXPECT_FALSE(hidden["entries"][0].contains("surface"));
  EXPECT_TRUE(hidden["entries"][0].contains("clue"));
}

TEST(Json, BadDocuments) {
  EXPECT_THROW(parse_puzzle("{"), Error);
  EXPECT_THROW(parse_puzzle(R"({"pattern":".."})"), Error);
}

TEST(Render, OneByTwo) {
  auto g = parse_pattern("..");
  auto lex = Lexicon::build({{"AB", Source::Topic, {"Capital [Answer] letters."}}}, NormalizationTable::latin());
  WordIndex index(lex);
  auto slots = extract_slots(g);
  auto p = assemble(g, slots, solve(slots, index, SolverConfig::exhaustive(0)), lex, 1);
  auto text = render_text(p);
  EXPECT_EQ(text, "AB\n\nACROSS\n1. Capital [Answer] letters. (2)\n\nDOWN\n");
  EXPECT_EQ(render_text(p, false).substr(0, 3), "..\n");
}

TEST(Render, SevenBySeven) {
  xwgen::testing::SyntheticLexiconSpec spec{.filler = 3000, .topic = 100, .seed = 2};
  auto lex = xwgen::testing::make_synthetic_lexicon(spec);
  WordIndex index(lex);
  auto g = generate_random_patterns(7, 7, 12, 1, {}, 8).front();
  auto slots = extract_slots(g);
  SolverConfig c;
  c.node_budget = 20000;
  auto r = solve(slots, index, c);
  ASSERT_TRUE(r.success());
  auto text = render_text(assemble(g, slots, r, lex, 1));
  std::istringstream in(text);
  std::string line;
  for (int i = 0; i < 7; ++i) {
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(utf8::decode(line).size(), 7u);
  }
  std::getline(in, line);
  EXPECT_TRUE(line.empty());
  EXPECT_EQ(text, render_text(assemble(g, slots, r, lex, 1)));
}
