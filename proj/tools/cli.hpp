#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "xwgen/xwgen.hpp"

namespace xwgen::cli {

enum ExitCode : int { kOk = 0, kGenerationFailed = 1, kUsage = 2, kDataError = 3 };

namespace detail {

/// Writes to a sibling temp file and renames it into place on success.
inline void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::Io, "short write to " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::Io, "cannot rename into " + path + ": " + ec.message());
  }
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_atomically(path, content);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::pair<int, int> parse_size(const std::string& s) {
  auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    int v = std::stoi(s.substr(0, x));
    int h = std::stoi(s.substr(x + 1));
    if (v <= 0 || h <= 0) throw std::invalid_argument(s);
    return {v, h};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidConfig, "size must look like 7x7, got '" + s + "'");
  }
}

/// "topic:words.txt", "filler:words.txt" or a path (.jsonl carries its own tags).
inline LexiconSource parse_lexicon_arg(const std::string& arg) {
  LexiconSource src;
  if (arg.rfind("topic:", 0) == 0) {
    src.path = arg.substr(6);
    src.default_source = Source::Topic;
  } else if (arg.rfind("filler:", 0) == 0) {
    src.path = arg.substr(7);
  } else {
    src.path = arg;
  }
  return src;
}

struct LexiconOptions {
  std::vector<std::string> files;
  std::string table;
};

inline void add_lexicon_options(CLI::App* cmd, LexiconOptions& opts, bool required) {
  auto* o = cmd->add_option("--lexicon", opts.files,
                            "Lexicon files: [topic:|filler:]words.txt or tagged .jsonl");
  if (required) o->required();
  cmd->add_option("--table", opts.table, "Normalization table JSON (default: Latin uppercase)");
}

inline NormalizationTable load_table(const std::string& path) {
  return path.empty() ? NormalizationTable::latin() : NormalizationTable::load(path);
}

inline Lexicon load_lexicon(const LexiconOptions& opts, std::ostream& err) {
  std::vector<LexiconSource> sources;
  for (const auto& f : opts.files) sources.push_back(parse_lexicon_arg(f));
  auto result = ingest_lexicon(sources, load_table(opts.table));
  err << "lexicon: " << result.lexicon.size() << " entries (" << result.lexicon.topic_count() << " topic, "
      << result.lexicon.filler_count() << " filler); skipped " << result.stats.skipped_too_short
      << " too short, " << result.stats.skipped_unmappable << " unmappable\n";
  return std::move(result.lexicon);
}

struct SolverOptions {
  int target_rate = 0;
  double time_limit = 300;
  double restart_interval = 10;
  std::optional<std::uint64_t> node_budget;
  Seed seed = 0;
  bool allow_duplicates = false;
  bool no_randomize = false;
};

inline void add_solver_options(CLI::App* cmd, SolverOptions& opts, bool with_target) {
  if (with_target) {
    cmd->add_option("--target-rate,-T", opts.target_rate, "Minimum percentage of topic answers")
        ->check(CLI::Range(0, 100));
  }
  cmd->add_option("--time-limit", opts.time_limit, "Global time limit in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--restart-interval", opts.restart_interval, "Seconds per restart episode")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--node-budget", opts.node_budget,
                  "Deterministic mode: node expansions per episode instead of wall-clock restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "Random seed");
  cmd->add_flag("--allow-duplicates", opts.allow_duplicates, "Allow the same answer in several slots");
  cmd->add_flag("--no-randomize", opts.no_randomize, "Do not shuffle tied candidates");
}

inline SolverConfig make_solver_config(const SolverOptions& o) {
  SolverConfig c;
  c.target_rate = o.target_rate;
  c.time_limit = Millis(static_cast<Millis::rep>(o.time_limit * 1000));
  c.restart_interval = Millis(static_cast<Millis::rep>(o.restart_interval * 1000));
  c.node_budget = o.node_budget;
  c.seed = o.seed;
  c.forbid_duplicate_answers = !o.allow_duplicates;
  c.randomize_ties = !o.no_randomize;
  c.validate();
  return c;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidConfig, "bad integer list '" + s + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "empty integer list");
  return out;
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::ExtractorUnavailable:
      return kUsage;
    default:
      return kDataError;
  }
}

}  // namespace detail

/// Runs the command line; argv[0] is the program name.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"News-centric crossword generator"};
  app.require_subcommand(1);

  // ingest
  std::string corpus_path, gazetteer_path, ingest_out;
  LexiconOptions ingest_lex;
  ClueConfig clue_config;
  auto* ingest = app.add_subcommand("ingest", "Build a clued topic lexicon (JSON Lines) from a corpus");
  ingest->add_option("--corpus", corpus_path, "Corpus JSON Lines")->required();
  ingest->add_option("--gazetteer", gazetteer_path, "Term list; without it, pre-tagged keywords are used");
  ingest->add_option("--table", ingest_lex.table, "Normalization table JSON");
  ingest->add_option("--mask", clue_config.mask_token, "Mask token");
  ingest->add_option("--min-context", clue_config.min_context_chars, "Minimum clue characters outside the mask");
  ingest->add_option("--out", ingest_out, "Output file (default stdout)");

  // patterns
  std::string pat_size = "7x7", pat_out;
  int pat_black = 0, pat_count = 10;
  Seed pat_seed = 0;
  PatternPolicy pat_policy;
  auto* patterns = app.add_subcommand("patterns", "Generate random black-cell patterns");
  patterns->add_option("--size", pat_size, "Grid size VxH");
  patterns->add_option("--black", pat_black, "Number of black cells")->required();
  patterns->add_option("--count", pat_count, "Number of distinct patterns");
  patterns->add_option("--seed", pat_seed, "Random seed");
  patterns->add_option("--min-slot-length", pat_policy.min_slot_length)->check(CLI::Range(2, 1000));
  patterns->add_flag("--connected", pat_policy.require_connected, "Require a connected white region");
  patterns->add_option("--out", pat_out, "Output file (default stdout)");

  // generate
  std::string gen_pattern, gen_size = "7x7", gen_out, gen_format = "json";
  int gen_black = -1;
  LexiconOptions gen_lex;
  SolverOptions gen_solver;
  bool gen_max_topic = false, gen_no_solution = false;
  std::optional<Seed> gen_clue_seed;
  auto* generate = app.add_subcommand("generate", "Fill a grid and write a puzzle");
  auto* gen_pattern_opt = generate->add_option("--pattern", gen_pattern, "Pattern file (first pattern is used)");
  auto* gen_size_opt = generate->add_option("--size", gen_size, "Grid size VxH for a random pattern");
  auto* gen_black_opt = generate->add_option("--black", gen_black, "Black cells for a random pattern");
  gen_pattern_opt->excludes(gen_black_opt)->excludes(gen_size_opt);
  add_lexicon_options(generate, gen_lex, true);
  add_solver_options(generate, gen_solver, true);
  generate->add_option("--clue-seed", gen_clue_seed, "Seed for clue choice (default: --seed)");
  generate->add_option("--out", gen_out, "Output file (default stdout)");
  generate->add_option("--format", gen_format, "json or text")->check(CLI::IsMember({"json", "text"}));
  generate->add_flag("--max-topic", gen_max_topic, "Keep raising T while solutions exist");
  generate->add_flag("--no-solution", gen_no_solution, "Omit answers from the output");

  // sweep
  LexiconOptions sweep_lex;
  SolverOptions sweep_solver;
  std::string sweep_size = "7x7", sweep_t = "10,20,30,40,50,60,70,80,90,100", sweep_black = "9,10,11,12";
  std::string sweep_patterns, sweep_out, sweep_summary, sweep_svg;
  int sweep_per_count = 10, sweep_trials = 1, sweep_jobs = 1;
  bool sweep_no_early = false;
  auto* sweep = app.add_subcommand("sweep", "Run a T x pattern experiment and write records as CSV");
  add_lexicon_options(sweep, sweep_lex, true);
  add_solver_options(sweep, sweep_solver, false);
  sweep->add_option("--size", sweep_size, "Grid size VxH");
  sweep->add_option("--t-values", sweep_t, "Comma-separated target rates");
  sweep->add_option("--black-counts", sweep_black, "Comma-separated black-cell counts");
  sweep->add_option("--patterns-per-count", sweep_per_count, "Random patterns per black count");
  sweep->add_option("--patterns", sweep_patterns, "Pattern file instead of random patterns");
  sweep->add_option("--trials", sweep_trials, "Trials per (pattern, T)");
  sweep->add_option("--jobs", sweep_jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--no-early-stop", sweep_no_early, "Run every T even after a pattern fails");
  sweep->add_option("--out", sweep_out, "Records CSV (default stdout)");
  sweep->add_option("--summary", sweep_summary, "Summary JSON file");
  sweep->add_option("--svg", sweep_svg, "Summary chart SVG file");

  // verify
  std::string verify_puzzle_path;
  LexiconOptions verify_lex;
  std::optional<int> verify_t;
  auto* verify = app.add_subcommand("verify", "Re-check a puzzle against a lexicon");
  verify->add_option("--puzzle", verify_puzzle_path, "Puzzle JSON")->required();
  add_lexicon_options(verify, verify_lex, true);
  verify->add_option("--target-rate,-T", verify_t, "Required topic percentage (default: from the puzzle)")
      ->check(CLI::Range(0, 100));

  // render
  std::string render_puzzle_path, render_out;
  bool render_no_solution = false;
  auto* render = app.add_subcommand("render", "Print a puzzle as text");
  render->add_option("--puzzle", render_puzzle_path, "Puzzle JSON")->required();
  render->add_flag("--no-solution", render_no_solution, "Show an empty grid");
  render->add_option("--out", render_out, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*ingest) {
      std::ifstream in(corpus_path);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + corpus_path);
      auto docs = parse_corpus_jsonl(in, corpus_path);
      std::unique_ptr<KeywordExtractor> extractor;
      if (gazetteer_path.empty()) {
        extractor = std::make_unique<PreTaggedExtractor>();
      } else {
        extractor = std::make_unique<GazetteerExtractor>(GazetteerExtractor::load(gazetteer_path));
      }
      auto result = build_topic_lexicon(docs, extractor.get(), load_table(ingest_lex.table), clue_config);
      std::string body;
      for (const auto& r : result.records) body += to_jsonl_record(r) + "\n";
      emit(ingest_out, body, out);
      const auto& s = result.stats;
      err << "ingest: " << s.documents << " documents, " << s.occurrences << " occurrences (" << s.documents_without_keywords
          << " documents without any), "
          << result.records.size() << " keywords; skipped " << s.skipped_normalization << " unnormalizable, "
          << s.unusable_clues << " unusable clues, " << s.keywords_without_clues << " keywords without clues\n";
      return kOk;
    }

    if (*patterns) {
      auto [v, h] = parse_size(pat_size);
      auto list = generate_random_patterns(v, h, pat_black, pat_count, pat_policy, pat_seed);
      emit(pat_out, render_pattern_file(list), out);
      return kOk;
    }

    if (*generate) {
      auto config = make_solver_config(gen_solver);
      GridPattern pattern;
      if (!gen_pattern.empty()) {
        pattern = parse_pattern_file(read_file(gen_pattern)).front();
      } else {
        if (gen_black < 0) throw Error(ErrorCode::InvalidConfig, "give --pattern or --black");
        auto [v, h] = parse_size(gen_size);
        pattern = generate_random_patterns(v, h, gen_black, 1, {}, derive_seed(config.seed, {0x70ULL})).front();
      }
      auto report = validate_pattern(pattern);
      if (!report.valid()) {
        throw Error(ErrorCode::InvalidConfig, std::string("pattern is not valid: ") + to_string(report.violations.front().kind));
      }
      auto lexicon = load_lexicon(gen_lex, err);
      WordIndex index(lexicon);
      auto slots = extract_slots(pattern);
      auto result = gen_max_topic ? maximize_topic_rate(slots, index, config) : solve(slots, index, config);
      if (!result.success()) {
        char ratio[32];
        std::snprintf(ratio, sizeof ratio, "%.4f", result.best_partial_ratio());
        err << "generation failed: status=" << to_string(result.status) << " restarts=" << result.restarts
            << " nodes=" << result.nodes_expanded << " deepest=" << result.deepest_assigned << "/"
            << result.total_slots << " best_ratio=" << ratio << "\n";
        return kGenerationFailed;
      }
      auto puzzle = assemble(pattern, slots, result, lexicon, gen_clue_seed.value_or(config.seed), config.seed);
      auto check = verify_puzzle(puzzle, lexicon, result.target_rate,
                                 {2, config.forbid_duplicate_answers});
      if (!check.ok()) throw Error(ErrorCode::MissingEntry, "internal check failed: " + check.violations.front().detail);
      emit(gen_out, gen_format == "json" ? serialize_puzzle(puzzle, !gen_no_solution)
                                         : render_text(puzzle, !gen_no_solution),
           out);
      return kOk;
    }

    if (*sweep) {
      SweepConfig sc;
      std::tie(sc.height, sc.width) = parse_size(sweep_size);
      sc.target_rates = parse_int_list(sweep_t);
      sc.black_counts = parse_int_list(sweep_black);
      sc.patterns_per_count = sweep_per_count;
      sc.trials_per_cell = sweep_trials;
      sc.seed = sweep_solver.seed;
      sc.early_stop = !sweep_no_early;
      sc.jobs = sweep_jobs;
      sc.solver = make_solver_config(sweep_solver);
      sc.validate();
      auto pats = sweep_patterns.empty() ? make_sweep_patterns(sc) : parse_pattern_file(read_file(sweep_patterns));
      auto lexicon = load_lexicon(sweep_lex, err);
      WordIndex index(lexicon);
      auto records = run_sweep(sc, index, pats);
      std::ostringstream csv;
      write_records_csv(records, csv);
      emit(sweep_out, csv.str(), out);
      if (!records.empty()) {
        auto summary = summarize(records);
        if (!sweep_summary.empty()) write_atomically(sweep_summary, to_json(summary).dump(2) + "\n");
        if (!sweep_svg.empty()) write_atomically(sweep_svg, render_svg(summary));
        for (const auto& r : summary.by_rate) {
          char line[160];
          std::snprintf(line, sizeof line, "T=%3d  runs=%3zu  success=%.3f  median_ms=%.1f\n", r.target_rate, r.runs,
                        r.probability, r.time_ms.median);
          err << line;
        }
      }
      return kOk;
    }

    if (*verify) {
      auto puzzle = parse_puzzle(read_file(verify_puzzle_path));
      auto lexicon = load_lexicon(verify_lex, err);
      auto report = verify_puzzle(puzzle, lexicon, verify_t.value_or(puzzle.metadata.target_rate));
      if (report.ok()) {
        out << "ok: " << puzzle.entries.size() << " entries verified\n";
        return kOk;
      }
      for (const auto& v : report.violations) out << to_string(v.kind) << ": " << v.detail << "\n";
      return kGenerationFailed;
    }

    if (*render) {
      auto puzzle = parse_puzzle(read_file(render_puzzle_path));
      emit(render_out, render_text(puzzle, !render_no_solution), out);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace xwgen::cli
