#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "xwgen/error.hpp"
#include "xwgen/rng.hpp"

namespace xwgen {

enum class Cell : std::uint8_t { White, Black };

enum class Orientation : std::uint8_t { Across, Down };

inline const char* to_string(Orientation o) { return o == Orientation::Across ? "across" : "down"; }

struct Position {
  int row = 0;
  int col = 0;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

/// A V x H grid of black and white cells. Black placement is fixed input.
class GridPattern {
 public:
  GridPattern() = default;

  GridPattern(int height, int width, std::vector<Cell> cells, std::string id = {})
      : height_(height), width_(width), cells_(std::move(cells)), id_(std::move(id)) {
    if (height_ <= 0 || width_ <= 0) {
      throw Error(ErrorCode::InvalidConfig, "grid dimensions must be positive");
    }
    if (cells_.size() != static_cast<size_t>(height_) * static_cast<size_t>(width_)) {
      throw Error(ErrorCode::InvalidConfig, "cell matrix does not match grid dimensions");
    }
  }

  static GridPattern all_white(int height, int width, std::string id = {}) {
    return GridPattern(height, width,
                       std::vector<Cell>(static_cast<size_t>(height) * width, Cell::White),
                       std::move(id));
  }

  int height() const { return height_; }
  int width() const { return width_; }
  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  bool in_bounds(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  Cell at(int row, int col) const { return cells_[index(row, col)]; }
  void set(int row, int col, Cell c) { cells_[index(row, col)] = c; }

  bool is_white(int row, int col) const { return in_bounds(row, col) && at(row, col) == Cell::White; }

  size_t index(int row, int col) const { return static_cast<size_t>(row) * width_ + col; }

  const std::vector<Cell>& cells() const { return cells_; }

  int black_count() const {
    return static_cast<int>(std::count(cells_.begin(), cells_.end(), Cell::Black));
  }
  int white_count() const { return static_cast<int>(cells_.size()) - black_count(); }

  friend bool operator==(const GridPattern&, const GridPattern&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Cell> cells_;
  std::string id_;
};

struct Slot {
  int id = 0;
  Orientation orientation = Orientation::Across;
  Position start;
  int length = 0;
  std::vector<Position> cells;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// A cell shared by an Across slot (slot_a) and a Down slot (slot_b).
struct Crossing {
  int slot_a = 0;
  int index_a = 0;
  int slot_b = 0;
  int index_b = 0;
  Position cell;

  friend bool operator==(const Crossing&, const Crossing&) = default;
};

struct SlotRef {
  int slot = 0;
  int index = 0;

  friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

struct PatternPolicy {
  int min_slot_length = 2;
  bool forbid_isolated_white = true;
  bool require_connected = false;
};

class SlotSet {
 public:
  SlotSet() = default;
  SlotSet(int height, int width, std::vector<Slot> slots, std::vector<Crossing> crossings,
          std::vector<std::vector<SlotRef>> cell_to_slots)
      : height_(height),
        width_(width),
        slots_(std::move(slots)),
        crossings_(std::move(crossings)),
        cell_to_slots_(std::move(cell_to_slots)) {}

  int height() const { return height_; }
  int width() const { return width_; }
  size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }

  const std::vector<Slot>& slots() const { return slots_; }
  const Slot& slot(int id) const { return slots_[static_cast<size_t>(id)]; }
  const std::vector<Crossing>& crossings() const { return crossings_; }

  const std::vector<SlotRef>& slots_at(Position p) const {
    return cell_to_slots_[static_cast<size_t>(p.row) * width_ + p.col];
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Slot> slots_;
  std::vector<Crossing> crossings_;
  std::vector<std::vector<SlotRef>> cell_to_slots_;
};

// ---------------------------------------------------------------------------
// Text format: '#' black, '.' white, one row per line, optional "id: <label>".

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (char ch : text) {
    if (ch == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty() && current.back() == '\r') current.pop_back();
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

inline std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

inline GridPattern parse_pattern_lines(const std::vector<std::string>& input) {
  std::string id;
  std::vector<std::string> rows;
  for (const auto& line : input) {
    if (rows.empty() && id.empty() && line.rfind("id:", 0) == 0) {
      id = trim(std::string_view(line).substr(3));
      continue;
    }
    rows.push_back(line);
  }
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorCode::EmptyInput, "pattern has no rows");
  }
  const size_t width = rows.front().size();
  std::vector<Cell> cells;
  cells.reserve(rows.size() * width);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw Error(ErrorCode::RaggedRows, "row " + std::to_string(r) + " has length " +
                                             std::to_string(rows[r].size()) + ", expected " +
                                             std::to_string(width));
    }
    for (size_t c = 0; c < width; ++c) {
      char ch = rows[r][c];
      if (ch == '#') {
        cells.push_back(Cell::Black);
      } else if (ch == '.') {
        cells.push_back(Cell::White);
      } else {
        throw Error(ErrorCode::IllegalCharacter, std::string("'") + ch + "' at row " +
                                                     std::to_string(r) + ", col " +
                                                     std::to_string(c));
      }
    }
  }
  return GridPattern(static_cast<int>(rows.size()), static_cast<int>(width), std::move(cells),
                     std::move(id));
}

}  // namespace detail

inline GridPattern parse_pattern(std::string_view text) {
  auto lines = detail::split_lines(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (const auto& l : lines) {
    if (l.empty()) throw Error(ErrorCode::RaggedRows, "blank line inside a single pattern");
  }
  return detail::parse_pattern_lines(lines);
}

/// Parses a file holding several patterns separated by blank lines.
inline std::vector<GridPattern> parse_pattern_file(std::string_view text) {
  std::vector<GridPattern> out;
  std::vector<std::string> block;
  for (auto& line : detail::split_lines(text)) {
    if (detail::trim(line).empty()) {
      if (!block.empty()) out.push_back(detail::parse_pattern_lines(block));
      block.clear();
    } else {
      block.push_back(std::move(line));
    }
  }
  if (!block.empty()) out.push_back(detail::parse_pattern_lines(block));
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no patterns in input");
  return out;
}

inline std::string render_pattern(const GridPattern& pattern) {
  std::string out;
  if (!pattern.id().empty()) out += "id: " + pattern.id() + "\n";
  for (int r = 0; r < pattern.height(); ++r) {
    if (r > 0) out.push_back('\n');
    for (int c = 0; c < pattern.width(); ++c) {
      out.push_back(pattern.at(r, c) == Cell::Black ? '#' : '.');
    }
  }
  return out;
}

inline std::string render_pattern_file(const std::vector<GridPattern>& patterns) {
  std::string out;
  for (size_t i = 0; i < patterns.size(); ++i) {
    if (i > 0) out += "\n";
    out += render_pattern(patterns[i]);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Extracts maximal white runs as slots: Across row-major, then Down row-major.
inline SlotSet extract_slots(const GridPattern& pattern, const PatternPolicy& policy = {}) {
  const int H = pattern.height();
  const int W = pattern.width();
  const int min_len = std::max(2, policy.min_slot_length);
  std::vector<Slot> slots;

  auto emit = [&](Orientation o, Position start, int length) {
    Slot s;
    s.id = static_cast<int>(slots.size());
    s.orientation = o;
    s.start = start;
    s.length = length;
    for (int k = 0; k < length; ++k) {
      s.cells.push_back(o == Orientation::Across ? Position{start.row, start.col + k}
                                                 : Position{start.row + k, start.col});
    }
    slots.push_back(std::move(s));
  };

  for (int r = 0; r < H; ++r) {
    int c = 0;
    while (c < W) {
      if (!pattern.is_white(r, c)) {
        ++c;
        continue;
      }
      int begin = c;
      while (c < W && pattern.is_white(r, c)) ++c;
      if (c - begin >= min_len) emit(Orientation::Across, {r, begin}, c - begin);
    }
  }
  // Down slots are discovered column by column but ordered row-major by start.
  std::vector<std::pair<Position, int>> downs;
  for (int c = 0; c < W; ++c) {
    int r = 0;
    while (r < H) {
      if (!pattern.is_white(r, c)) {
        ++r;
        continue;
      }
      int begin = r;
      while (r < H && pattern.is_white(r, c)) ++r;
      if (r - begin >= min_len) downs.push_back({{begin, c}, r - begin});
    }
  }
  std::sort(downs.begin(), downs.end());
  for (const auto& [start, len] : downs) emit(Orientation::Down, start, len);

  std::vector<std::vector<SlotRef>> membership(static_cast<size_t>(H) * W);
  for (const auto& s : slots) {
    for (int k = 0; k < s.length; ++k) {
      const auto& p = s.cells[static_cast<size_t>(k)];
      membership[static_cast<size_t>(p.row) * W + p.col].push_back({s.id, k});
    }
  }
  std::vector<Crossing> crossings;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const auto& m = membership[static_cast<size_t>(r) * W + c];
      if (m.size() == 2) {
        // Across slots always precede Down slots, so m[0] is the Across one.
        crossings.push_back({m[0].slot, m[0].index, m[1].slot, m[1].index, {r, c}});
      }
    }
  }
  return SlotSet(H, W, std::move(slots), std::move(crossings), std::move(membership));
}

enum class ViolationKind { NoWhiteCells, UncoveredWhiteCell, Disconnected };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::NoWhiteCells: return "no-white-cells";
    case ViolationKind::UncoveredWhiteCell: return "uncovered-white-cell";
    case ViolationKind::Disconnected: return "disconnected";
  }
  return "unknown";
}

struct PatternViolation {
  ViolationKind kind;
  Position cell;
};

struct ValidationReport {
  std::vector<PatternViolation> violations;
  bool valid() const { return violations.empty(); }
};

inline ValidationReport validate_pattern(const GridPattern& pattern, const PatternPolicy& policy = {}) {
  ValidationReport report;
  if (pattern.white_count() == 0) {
    report.violations.push_back({ViolationKind::NoWhiteCells, {0, 0}});
    return report;
  }
  if (policy.forbid_isolated_white) {
    auto slots = extract_slots(pattern, policy);
    for (int r = 0; r < pattern.height(); ++r) {
      for (int c = 0; c < pattern.width(); ++c) {
        if (pattern.is_white(r, c) && slots.slots_at({r, c}).empty()) {
          report.violations.push_back({ViolationKind::UncoveredWhiteCell, {r, c}});
        }
      }
    }
  }
  if (policy.require_connected) {
    std::vector<char> seen(pattern.cells().size(), 0);
    Position first{-1, -1};
    for (int r = 0; r < pattern.height() && first.row < 0; ++r) {
      for (int c = 0; c < pattern.width(); ++c) {
        if (pattern.is_white(r, c)) {
          first = {r, c};
          break;
        }
      }
    }
    std::queue<Position> frontier;
    frontier.push(first);
    seen[pattern.index(first.row, first.col)] = 1;
    while (!frontier.empty()) {
      auto p = frontier.front();
      frontier.pop();
      const Position steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto d : steps) {
        Position q{p.row + d.row, p.col + d.col};
        if (pattern.is_white(q.row, q.col) && !seen[pattern.index(q.row, q.col)]) {
          seen[pattern.index(q.row, q.col)] = 1;
          frontier.push(q);
        }
      }
    }
    for (int r = 0; r < pattern.height(); ++r) {
      for (int c = 0; c < pattern.width(); ++c) {
        if (pattern.is_white(r, c) && !seen[pattern.index(r, c)]) {
          report.violations.push_back({ViolationKind::Disconnected, {r, c}});
        }
      }
    }
  }
  return report;
}

/// Rejection-samples `count` distinct valid patterns with exactly n_black black
/// cells. Subsets are drawn uniformly; the same seed gives the same list.
inline std::vector<GridPattern> generate_random_patterns(int height, int width, int n_black, int count,
                                                         const PatternPolicy& policy, Seed seed,
                                                         long max_attempts = 1'000'000) {
  const int total = height * width;
  if (height <= 0 || width <= 0) throw Error(ErrorCode::InvalidConfig, "grid size must be positive");
  if (n_black < 0 || n_black >= total) {
    throw Error(ErrorCode::InvalidConfig, "n_black must satisfy 0 <= n_black < V*H");
  }
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "count must be at least 1");

  Rng rng(seed);
  std::vector<int> order(static_cast<size_t>(total));
  std::set<std::vector<Cell>> seen;
  std::vector<GridPattern> out;
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
    for (int i = 0; i < total; ++i) order[static_cast<size_t>(i)] = i;
    // Partial Fisher-Yates: the first n_black entries are a uniform subset.
    for (int i = 0; i < n_black; ++i) {
      auto j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(total - i)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    std::vector<Cell> cells(static_cast<size_t>(total), Cell::White);
    for (int i = 0; i < n_black; ++i) cells[static_cast<size_t>(order[static_cast<size_t>(i)])] = Cell::Black;
    if (seen.count(cells)) continue;
    GridPattern candidate(height, width, cells);
    if (!validate_pattern(candidate, policy).valid()) continue;
    seen.insert(cells);
    std::ostringstream id;
    id << height << "x" << width << "-b" << std::setfill('0') << std::setw(2) << n_black << "-"
       << std::setw(3) << out.size();
    candidate.set_id(id.str());
    out.push_back(std::move(candidate));
  }
  if (static_cast<int>(out.size()) < count) {
    throw Error(ErrorCode::ExhaustedAttempts, "found only " + std::to_string(out.size()) + " of " +
                                                  std::to_string(count) + " valid patterns");
  }
  return out;
}

}  // namespace xwgen
