#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "xwgen/error.hpp"
#include "xwgen/grid.hpp"
#include "xwgen/rng.hpp"
#include "xwgen/solver.hpp"
#include "xwgen/word_index.hpp"

namespace xwgen {

struct SweepConfig {
  int height = 7;
  int width = 7;
  std::vector<int> target_rates{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<int> black_counts{9, 10, 11, 12};
  int patterns_per_count = 10;
  int trials_per_cell = 1;
  Seed seed = 0;
  /// Per pattern, stop raising T after the first level where every trial failed.
  bool early_stop = true;
  int jobs = 1;
  PatternPolicy policy;
  /// target_rate and seed are overwritten per trial.
  SolverConfig solver;

  void validate() const {
    if (target_rates.empty() || black_counts.empty()) {
      throw Error(ErrorCode::InvalidConfig, "sweep needs at least one T value and one black count");
    }
    if (trials_per_cell < 1 || patterns_per_count < 1 || jobs < 1) {
      throw Error(ErrorCode::InvalidConfig, "trials, patterns per count and jobs must be positive");
    }
    for (int t : target_rates) {
      if (t < 0 || t > 100) throw Error(ErrorCode::InvalidConfig, "T values must lie in [0, 100]");
    }
    solver.validate();
  }
};

struct ExperimentRecord {
  std::string pattern_id;
  int n_black = 0;
  int target_rate = 0;
  Seed seed = 0;
  int trial = 0;
  FillStatus status = FillStatus::Exhausted;
  bool success = false;
  std::int64_t time_ms = 0;
  std::uint64_t restarts = 0;
  std::uint64_t nodes_expanded = 0;
  double achieved_topic_ratio = 0.0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// 10 seeded patterns per black count by default, in black-count order.
inline std::vector<GridPattern> make_sweep_patterns(const SweepConfig& config) {
  std::vector<GridPattern> out;
  for (int n_black : config.black_counts) {
    auto batch = generate_random_patterns(config.height, config.width, n_black, config.patterns_per_count,
                                          config.policy, derive_seed(config.seed, {0x7061ULL, static_cast<std::uint64_t>(n_black)}));
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

namespace detail {

inline std::vector<ExperimentRecord> sweep_pattern(const SweepConfig& config, const WordIndex& index,
                                                   const GridPattern& pattern, size_t pattern_no) {
  std::vector<ExperimentRecord> out;
  const auto slots = extract_slots(pattern, config.policy);
  for (int t : config.target_rates) {
    bool any_success = false;
    for (int trial = 0; trial < config.trials_per_cell; ++trial) {
      SolverConfig sc = config.solver;
      sc.target_rate = t;
      sc.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(pattern_no), static_cast<std::uint64_t>(t),
                                          static_cast<std::uint64_t>(trial)});
      auto r = solve(slots, index, sc);
      ExperimentRecord rec;
      rec.pattern_id = pattern.id();
      rec.n_black = pattern.black_count();
      rec.target_rate = t;
      rec.seed = sc.seed;
      rec.trial = trial;
      rec.status = r.status;
      rec.success = r.success();
      rec.time_ms = r.elapsed.count();
      rec.restarts = r.restarts;
      rec.nodes_expanded = r.nodes_expanded;
      rec.achieved_topic_ratio = r.achieved_topic_ratio();
      any_success = any_success || rec.success;
      out.push_back(std::move(rec));
    }
    if (config.early_stop && !any_success) break;
  }
  return out;
}

}  // namespace detail

/// One record per (pattern, T, trial), minus early-stopped cells, sorted by
/// (pattern_id, T, trial). Patterns run on `jobs` worker threads.
inline std::vector<ExperimentRecord> run_sweep(const SweepConfig& config, const WordIndex& index,
                                               std::vector<GridPattern> patterns) {
  config.validate();
  for (size_t i = 0; i < patterns.size(); ++i) {
    if (patterns[i].id().empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "p%03zu", i);
      patterns[i].set_id(buf);
    }
  }
  std::vector<std::vector<ExperimentRecord>> per_pattern(patterns.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < patterns.size(); i = next++) {
      per_pattern[i] = detail::sweep_pattern(config, index, patterns[i], i);
    }
  };
  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(patterns.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<ExperimentRecord> records;
  for (auto& batch : per_pattern) records.insert(records.end(), batch.begin(), batch.end());
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.pattern_id, a.target_rate, a.trial) < std::tie(b.pattern_id, b.target_rate, b.trial);
  });
  return records;
}

// ---------------------------------------------------------------------------
// Summaries.

struct Quantiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  size_t n = 0;
};

/// Linear-interpolation quantiles (the usual "type 7" definition).
inline Quantiles quantiles(std::vector<double> values) {
  Quantiles q;
  q.n = values.size();
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    double h = (static_cast<double>(values.size()) - 1) * p;
    auto lo = static_cast<size_t>(std::floor(h));
    auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.min = values.front();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.max = values.back();
  return q;
}

struct RateRow {
  int target_rate = 0;
  size_t runs = 0;
  size_t successes = 0;
  double probability = 0;
  Quantiles time_ms;  // successful runs only
  Quantiles nodes;    // successful runs only
};

struct BlackRow {
  int target_rate = -1;  // -1: pooled over every T
  int n_black = 0;
  size_t runs = 0;
  size_t successes = 0;
  Quantiles time_ms;
};

struct SummaryTables {
  std::vector<RateRow> by_rate;
  std::vector<BlackRow> by_black;        // pooled over T
  std::vector<BlackRow> by_black_and_rate;

  const RateRow* rate(int t) const {
    for (const auto& r : by_rate) {
      if (r.target_rate == t) return &r;
    }
    return nullptr;
  }
  const BlackRow* black(int n_black, int t = -1) const {
    const auto& rows = t < 0 ? by_black : by_black_and_rate;
    for (const auto& r : rows) {
      if (r.n_black == n_black && r.target_rate == t) return &r;
    }
    return nullptr;
  }
};

/// Success probability pools all patterns at each T.
inline SummaryTables summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records to summarize");
  struct Acc {
    size_t runs = 0, successes = 0;
    std::vector<double> times, nodes;
  };
  std::map<int, Acc> by_rate;
  std::map<int, Acc> by_black;
  std::map<std::pair<int, int>, Acc> by_both;
  for (const auto& r : records) {
    for (Acc* a : {&by_rate[r.target_rate], &by_black[r.n_black], &by_both[{r.target_rate, r.n_black}]}) {
      ++a->runs;
      if (r.success) {
        ++a->successes;
        a->times.push_back(static_cast<double>(r.time_ms));
        a->nodes.push_back(static_cast<double>(r.nodes_expanded));
      }
    }
  }
  SummaryTables s;
  for (auto& [t, a] : by_rate) {
    s.by_rate.push_back({t, a.runs, a.successes, static_cast<double>(a.successes) / static_cast<double>(a.runs),
                         quantiles(a.times), quantiles(a.nodes)});
  }
  for (auto& [b, a] : by_black) s.by_black.push_back({-1, b, a.runs, a.successes, quantiles(a.times)});
  for (auto& [key, a] : by_both) s.by_black_and_rate.push_back({key.first, key.second, a.runs, a.successes, quantiles(a.times)});
  return s;
}

inline nlohmann::json to_json(const Quantiles& q) {
  return {{"n", q.n}, {"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

inline nlohmann::json to_json(const SummaryTables& s) {
  nlohmann::json doc;
  doc["by_target_rate"] = nlohmann::json::array();
  for (const auto& r : s.by_rate) {
    doc["by_target_rate"].push_back({{"T", r.target_rate},
                                     {"runs", r.runs},
                                     {"successes", r.successes},
                                     {"success_probability", r.probability},
                                     {"time_ms", to_json(r.time_ms)},
                                     {"nodes_expanded", to_json(r.nodes)}});
  }
  auto rows = [](const std::vector<BlackRow>& in) {
    auto arr = nlohmann::json::array();
    for (const auto& r : in) {
      nlohmann::json j{{"n_black", r.n_black}, {"runs", r.runs}, {"successes", r.successes}, {"time_ms", to_json(r.time_ms)}};
      if (r.target_rate >= 0) j["T"] = r.target_rate;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  doc["by_black_count"] = rows(s.by_black);
  doc["by_black_count_and_T"] = rows(s.by_black_and_rate);
  return doc;
}

/// Success probability (left axis) and median success time (right axis) by T.
inline std::string render_svg(const SummaryTables& s) {
  const double W = 640, H = 360, L = 60, R = 60, T = 30, B = 50;
  double max_time = 1;
  for (const auto& r : s.by_rate) max_time = std::max(max_time, r.time_ms.median);
  auto x = [&](int t) { return L + (W - L - R) * t / 100.0; };
  auto y_prob = [&](double p) { return H - B - (H - T - B) * p; };
  auto y_time = [&](double ms) { return H - B - (H - T - B) * ms / max_time; };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << W - R << "\" y1=\"" << T << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 100; t += 10) {
    out << "<text x=\"" << x(t) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"middle\">" << t << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"middle\">target rate T (%)</text>\n";
  out << "<text x=\"15\" y=\"" << T - 10 << "\" font-size=\"12\" fill=\"steelblue\">success probability</text>\n";
  out << "<text x=\"" << W - 15 << "\" y=\"" << T - 10 << "\" font-size=\"12\" fill=\"darkorange\" text-anchor=\"end\">median time (ms, max "
      << max_time << ")</text>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& r : s.by_rate) out << x(r.target_rate) << "," << y_prob(r.probability) << " ";
  out << "\"/>\n<polyline fill=\"none\" stroke=\"darkorange\" stroke-width=\"2\" points=\"";
  for (const auto& r : s.by_rate) {
    if (r.time_ms.n) out << x(r.target_rate) << "," << y_time(r.time_ms.median) << " ";
  }
  out << "\"/>\n</svg>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV.

inline constexpr const char* kRecordsHeader =
    "pattern_id,n_black,T,seed,trial,status,success,time_ms,restarts,nodes_expanded,achieved_topic_ratio";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace detail

inline void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  out << kRecordsHeader << "\n";
  char ratio[40];
  for (const auto& r : records) {
    std::snprintf(ratio, sizeof ratio, "%.17g", r.achieved_topic_ratio);
    out << detail::csv_field(r.pattern_id) << ',' << r.n_black << ',' << r.target_rate << ',' << r.seed << ','
        << r.trial << ',' << to_string(r.status) << ',' << (r.success ? "true" : "false") << ',' << r.time_ms << ','
        << r.restarts << ',' << r.nodes_expanded << ',' << ratio << "\n";
  }
}

inline std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, "missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw Error(ErrorCode::SchemaMismatch, "unexpected CSV header: " + line);
  std::vector<ExperimentRecord> out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = detail::csv_split(line);
    if (f.size() != 11) {
      throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) + ": expected 11 fields");
    }
    try {
      ExperimentRecord r;
      r.pattern_id = f[0];
      r.n_black = std::stoi(f[1]);
      r.target_rate = std::stoi(f[2]);
      r.seed = std::stoull(f[3]);
      r.trial = std::stoi(f[4]);
      r.status = parse_fill_status(f[5]);
      if (f[6] != "true" && f[6] != "false") throw Error(ErrorCode::SchemaMismatch, "bad success flag");
      r.success = f[6] == "true";
      r.time_ms = std::stoll(f[7]);
      r.restarts = std::stoull(f[8]);
      r.nodes_expanded = std::stoull(f[9]);
      r.achieved_topic_ratio = std::strtod(f[10].c_str(), nullptr);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) + ": malformed number");
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline void write_records_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_records_csv(records, out);
}

inline std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  return read_records_csv(in);
}

}  // namespace xwgen
