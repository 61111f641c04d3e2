#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xwgen/error.hpp"
#include "xwgen/grid.hpp"
#include "xwgen/rng.hpp"
#include "xwgen/word_index.hpp"

namespace xwgen {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kUnlimited = Millis::max();

struct SolverConfig {
  /// Minimum percentage of placed answers that must be Topic words.
  int target_rate = 0;
  Millis time_limit{300'000};
  Millis restart_interval{10'000};
  /// When set, episodes end after this many node expansions instead of on the
  /// wall clock, and the episode count is capped at time_limit / restart_interval.
  std::optional<std::uint64_t> node_budget;
  Seed seed = 0;
  bool forbid_duplicate_answers = true;
  bool randomize_ties = true;
  /// Off only in tests that check pruning does not change outcomes.
  bool quota_pruning = true;

  bool deterministic() const { return node_budget.has_value(); }

  std::uint64_t episode_cap() const {
    if (time_limit == kUnlimited) return std::numeric_limits<std::uint64_t>::max();
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(time_limit.count() / restart_interval.count()));
  }

  void validate() const {
    if (target_rate < 0 || target_rate > 100) {
      throw Error(ErrorCode::InvalidConfig, "target rate must lie in [0, 100]");
    }
    if (time_limit.count() <= 0 || restart_interval.count() <= 0) {
      throw Error(ErrorCode::InvalidConfig, "time limit and restart interval must be positive");
    }
    if (restart_interval > time_limit) {
      throw Error(ErrorCode::InvalidConfig, "restart interval exceeds the time limit");
    }
    if (node_budget && *node_budget < 1) throw Error(ErrorCode::InvalidConfig, "node budget must be at least 1");
  }

  /// Single complete depth-first search: no limits, no tie shuffling.
  static SolverConfig exhaustive(int target_rate) {
    SolverConfig c;
    c.target_rate = target_rate;
    c.time_limit = kUnlimited;
    c.restart_interval = kUnlimited;
    c.randomize_ties = false;
    return c;
  }
};

/// ceil(total * T / 100): the smallest Topic count satisfying "at least T %".
inline int required_topic_slots(int total_slots, int target_rate) {
  return (total_slots * target_rate + 99) / 100;
}

inline bool quota_feasible(int topic_count, int unassigned, int total_slots, int target_rate) {
  return topic_count + unassigned >= required_topic_slots(total_slots, target_rate);
}

/// Partial assignment plus incrementally maintained candidate counts.
///
/// For every unassigned slot, candidate_count() is the number of words that
/// fit the letters currently fixed by crossings and are not yet used.
class FillState {
 public:
  FillState(const SlotSet& slots, const WordIndex& index, bool forbid_duplicates = true)
      : slots_(&slots), index_(&index), forbid_duplicates_(forbid_duplicates) {
    const size_t n = slots.size();
    assignment_.assign(n, kNone);
    letters_.assign(static_cast<size_t>(slots.height()) * slots.width(), 0);
    cell_refs_.assign(letters_.size(), 0);
    buckets_.resize(n, nullptr);
    counts_.assign(n, 0);
    neighbors_.resize(n);
    touched_.assign(n, 0);
    for (const auto& s : slots.slots()) {
      buckets_[static_cast<size_t>(s.id)] = index.bucket(s.length);
      for (int k = 0; k < s.length; ++k) {
        for (const auto& ref : slots.slots_at(s.cells[static_cast<size_t>(k)])) {
          if (ref.slot != s.id) neighbors_[static_cast<size_t>(s.id)].push_back({ref.slot, k});
        }
      }
    }
    for (int len : index.lengths()) used_.emplace(len, Bitset(index.bucket(len)->order.size()));
    unassigned_ = static_cast<int>(n);
    for (size_t s = 0; s < n; ++s) counts_[s] = compute_count(static_cast<int>(s));
  }

  const SlotSet& slots() const { return *slots_; }
  const WordIndex& index() const { return *index_; }
  int total_slots() const { return static_cast<int>(slots_->size()); }
  int unassigned_count() const { return unassigned_; }
  int assigned_count() const { return total_slots() - unassigned_; }
  int topic_count() const { return topic_; }

  bool is_assigned(int slot) const { return assignment_[static_cast<size_t>(slot)] != kNone; }
  std::optional<EntryId> entry_at(int slot) const {
    auto id = assignment_[static_cast<size_t>(slot)];
    return id == kNone ? std::nullopt : std::optional<EntryId>(id);
  }
  char32_t letter_at(Position p) const { return letters_[cell(p)]; }

  bool is_used(EntryId id) const {
    if (!forbid_duplicates_) return false;
    const auto& e = index_->entry(id);
    auto it = used_.find(e.length());
    return it != used_.end() && it->second.test(index_->rank(id));
  }

  size_t candidate_count(int slot) const { return counts_[static_cast<size_t>(slot)]; }

  /// Number of crossing slots that are still unassigned.
  int open_crossings(int slot) const {
    int n = 0;
    for (const auto& nb : neighbors_[static_cast<size_t>(slot)]) n += is_assigned(nb.slot) ? 0 : 1;
    return n;
  }

  std::vector<LetterConstraint> fixed_letters(int slot) const {
    std::vector<LetterConstraint> fixed;
    const auto& s = slots_->slot(slot);
    for (int k = 0; k < s.length; ++k) {
      char32_t c = letters_[cell(s.cells[static_cast<size_t>(k)])];
      if (c) fixed.push_back({k, c});
    }
    return fixed;
  }

  /// Current candidates of a slot in canonical order (Topic first, then by answer).
  /// Returns the number of Topic candidates at the front via `topic_prefix`.
  std::vector<EntryId> candidate_list(int slot, size_t* topic_prefix = nullptr) const {
    std::vector<EntryId> out;
    if (topic_prefix) *topic_prefix = 0;
    const auto* b = buckets_[static_cast<size_t>(slot)];
    if (!b) return out;
    auto fixed = fixed_letters(slot);
    if (!index_->match(*b, fixed, scratch_)) return out;
    const Bitset* used = forbid_duplicates_ ? &used_.at(b->length) : nullptr;
    size_t topics = 0;
    scratch_.for_each([&](size_t k) {
      if (used && used->test(k)) return;
      out.push_back(b->order[k]);
      if (k < b->topic_count) ++topics;
    });
    if (topic_prefix) *topic_prefix = topics;
    return out;
  }

  void assign(int slot, EntryId id) {
    const auto& s = slots_->slot(slot);
    const auto& entry = index_->entry(id);
    UndoFrame frame;
    frame.slot = slot;
    frame.count_mark = count_log_.size();
    assignment_[static_cast<size_t>(slot)] = id;
    --unassigned_;
    if (entry.source == Source::Topic) ++topic_;
    for (int k = 0; k < s.length; ++k) {
      auto c = cell(s.cells[static_cast<size_t>(k)]);
      if (cell_refs_[c]++ == 0) letters_[c] = entry.letters[static_cast<size_t>(k)];
    }
    if (forbid_duplicates_) used_.at(entry.length()).set(index_->rank(id));

    // Crossing slots gained a letter: recount from scratch.
    ++epoch_;
    for (const auto& nb : neighbors_[static_cast<size_t>(slot)]) {
      if (is_assigned(nb.slot) || touched_[static_cast<size_t>(nb.slot)] == epoch_) continue;
      touched_[static_cast<size_t>(nb.slot)] = epoch_;
      log_count(nb.slot);
      counts_[static_cast<size_t>(nb.slot)] = compute_count(nb.slot);
    }
    // Other open slots of the same length lose this word if it still fit them.
    if (forbid_duplicates_) {
      for (const auto& other : slots_->slots()) {
        if (other.length != s.length || is_assigned(other.id) || touched_[static_cast<size_t>(other.id)] == epoch_) continue;
        if (fits(other, entry.letters)) {
          log_count(other.id);
          --counts_[static_cast<size_t>(other.id)];
        }
      }
    }
    undo_.push_back(frame);
  }

  /// Reverts the most recent assign().
  void undo() {
    UndoFrame frame = undo_.back();
    undo_.pop_back();
    const int slot = frame.slot;
    const auto& s = slots_->slot(slot);
    EntryId id = assignment_[static_cast<size_t>(slot)];
    const auto& entry = index_->entry(id);
    while (count_log_.size() > frame.count_mark) {
      auto [other, old] = count_log_.back();
      count_log_.pop_back();
      counts_[static_cast<size_t>(other)] = old;
    }
    if (forbid_duplicates_) used_.at(entry.length()).reset(index_->rank(id));
    for (int k = 0; k < s.length; ++k) {
      auto c = cell(s.cells[static_cast<size_t>(k)]);
      if (--cell_refs_[c] == 0) letters_[c] = 0;
    }
    if (entry.source == Source::Topic) --topic_;
    ++unassigned_;
    assignment_[static_cast<size_t>(slot)] = kNone;
  }

  std::vector<EntryId> assignment() const { return assignment_; }

 private:
  static constexpr EntryId kNone = std::numeric_limits<EntryId>::max();

  struct Neighbor {
    int slot;
    int my_index;
  };
  struct UndoFrame {
    int slot;
    size_t count_mark;
  };

  size_t cell(Position p) const { return static_cast<size_t>(p.row) * slots_->width() + p.col; }

  bool fits(const Slot& s, const std::u32string& letters) const {
    for (int k = 0; k < s.length; ++k) {
      char32_t c = letters_[cell(s.cells[static_cast<size_t>(k)])];
      if (c && c != letters[static_cast<size_t>(k)]) return false;
    }
    return true;
  }

  void log_count(int slot) { count_log_.push_back({slot, counts_[static_cast<size_t>(slot)]}); }

  size_t compute_count(int slot) const {
    const auto* b = buckets_[static_cast<size_t>(slot)];
    if (!b) return 0;
    auto fixed = fixed_letters(slot);
    if (!index_->match(*b, fixed, scratch_)) return 0;
    return forbid_duplicates_ ? scratch_.count_and_not(used_.at(b->length)) : scratch_.count();
  }

  const SlotSet* slots_;
  const WordIndex* index_;
  bool forbid_duplicates_;
  std::vector<EntryId> assignment_;
  std::vector<char32_t> letters_;
  std::vector<int> cell_refs_;
  std::vector<const LengthBucket*> buckets_;
  std::vector<size_t> counts_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::map<int, Bitset> used_;
  int unassigned_ = 0;
  int topic_ = 0;
  std::vector<UndoFrame> undo_;
  std::vector<std::pair<int, size_t>> count_log_;
  std::vector<std::uint64_t> touched_;
  std::uint64_t epoch_ = 0;
  mutable Bitset scratch_;
};

inline bool quota_feasible(const FillState& state, int total_slots, int target_rate) {
  return quota_feasible(state.topic_count(), state.unassigned_count(), total_slots, target_rate);
}

/// Most-constrained unassigned slot; ties go to the slot with more open
/// crossings, then to the lowest slot id.
inline int choose_next_slot(const FillState& state) {
  int best = -1;
  size_t best_count = 0;
  int best_degree = 0;
  for (int s = 0; s < state.total_slots(); ++s) {
    if (state.is_assigned(s)) continue;
    size_t count = state.candidate_count(s);
    if (best >= 0 && count > best_count) continue;
    int degree = state.open_crossings(s);
    if (best < 0 || count < best_count || degree > best_degree) {
      best = s;
      best_count = count;
      best_degree = degree;
    }
  }
  if (best < 0) throw Error(ErrorCode::InvalidConfig, "choose_next_slot called with no open slot");
  return best;
}

enum class FillStatus { Success, Timeout, Exhausted };

inline const char* to_string(FillStatus s) {
  switch (s) {
    case FillStatus::Success: return "success";
    case FillStatus::Timeout: return "timeout";
    case FillStatus::Exhausted: return "exhausted";
  }
  return "unknown";
}

inline FillStatus parse_fill_status(std::string_view s) {
  if (s == "success") return FillStatus::Success;
  if (s == "timeout") return FillStatus::Timeout;
  if (s == "exhausted") return FillStatus::Exhausted;
  throw Error(ErrorCode::ParseError, "unknown fill status '" + std::string(s) + "'");
}

struct FillResult {
  FillStatus status = FillStatus::Exhausted;
  /// Entry per slot id; complete on Success, empty otherwise.
  std::vector<EntryId> assignment;
  int topic_count = 0;
  int total_slots = 0;
  int target_rate = 0;
  /// Wall-clock time, or node-derived virtual time in deterministic mode.
  Millis elapsed{0};
  Millis wall_time{0};
  std::uint64_t restarts = 0;
  std::uint64_t nodes_expanded = 0;
  /// Deepest partial fill reached (diagnostic for failures).
  int deepest_assigned = 0;
  int deepest_topic = 0;

  bool success() const { return status == FillStatus::Success; }
  std::uint64_t episodes() const { return restarts + 1; }

  double achieved_topic_ratio() const {
    return success() && total_slots > 0 ? static_cast<double>(topic_count) / total_slots : 0.0;
  }
  /// Topic share of the deepest partial fill, relative to all slots.
  double best_partial_ratio() const {
    return total_slots > 0 ? static_cast<double>(deepest_topic) / total_slots : 0.0;
  }
};

namespace detail {

enum class EpisodeOutcome { Success, Exhausted, Cut };

/// One bounded depth-first search with its own tie-shuffling state.
class Episode {
 public:
  using Clock = std::chrono::steady_clock;

  Episode(FillState& state, const SolverConfig& config, Seed episode_seed, std::uint64_t node_limit,
          std::optional<Clock::time_point> deadline)
      : state_(state),
        config_(config),
        rng_(episode_seed),
        node_limit_(node_limit),
        deadline_(deadline),
        needed_(required_topic_slots(state.total_slots(), config.target_rate)) {}

  EpisodeOutcome run() { return search(); }

  std::uint64_t nodes() const { return nodes_; }
  int deepest_assigned() const { return deepest_assigned_; }
  int deepest_topic() const { return deepest_topic_; }

 private:
  EpisodeOutcome search() {
    if (state_.unassigned_count() == 0) {
      return state_.topic_count() >= needed_ ? EpisodeOutcome::Success : EpisodeOutcome::Exhausted;
    }
    const int slot = choose_next_slot(state_);
    if (state_.candidate_count(slot) == 0) return EpisodeOutcome::Exhausted;

    size_t topics = 0;
    auto list = state_.candidate_list(slot, &topics);
    if (config_.randomize_ties) {
      shuffle_range(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(topics), rng_);
      shuffle_range(list.begin() + static_cast<std::ptrdiff_t>(topics), list.end(), rng_);
    }
    for (size_t k = 0; k < list.size(); ++k) {
      const bool topic = k < topics;
      // Every remaining candidate is Filler; none can keep the quota reachable.
      if (config_.quota_pruning && !topic &&
          !quota_feasible(state_.topic_count(), state_.unassigned_count() - 1, state_.total_slots(),
                          config_.target_rate)) {
        break;
      }
      if (out_of_budget()) return EpisodeOutcome::Cut;
      ++nodes_;
      state_.assign(slot, list[k]);
      if (state_.assigned_count() > deepest_assigned_ ||
          (state_.assigned_count() == deepest_assigned_ && state_.topic_count() > deepest_topic_)) {
        deepest_assigned_ = state_.assigned_count();
        deepest_topic_ = state_.topic_count();
      }
      auto outcome = search();
      if (outcome == EpisodeOutcome::Success) return outcome;
      state_.undo();
      if (outcome == EpisodeOutcome::Cut) return outcome;
    }
    return EpisodeOutcome::Exhausted;
  }

  bool out_of_budget() {
    if (nodes_ >= node_limit_) return true;
    if (deadline_ && (nodes_ & 255) == 0 && Clock::now() >= *deadline_) {
      expired_ = true;
    }
    return expired_;
  }

  FillState& state_;
  const SolverConfig& config_;
  Rng rng_;
  std::uint64_t node_limit_;
  std::optional<Clock::time_point> deadline_;
  int needed_;
  std::uint64_t nodes_ = 0;
  bool expired_ = false;
  int deepest_assigned_ = 0;
  int deepest_topic_ = 0;
};

}  // namespace detail

/// Restart policy around the depth-first search.
///
/// Wall-clock mode: each episode runs for restart_interval, the next one
/// reseeds with derive_seed(seed, episode); stops on Success or once
/// time_limit has elapsed. Deterministic mode (node_budget set): episodes end
/// after node_budget expansions and at most episode_cap() episodes run.
/// An episode that finishes without being cut has searched the whole space,
/// which proves unsatisfiability whatever the tie order (status Exhausted).
inline FillResult run_with_restarts(const SlotSet& slots, const WordIndex& index, const SolverConfig& config) {
  using Clock = std::chrono::steady_clock;
  config.validate();
  if (slots.empty()) throw Error(ErrorCode::InvalidConfig, "pattern has no slots to fill");

  const auto start = Clock::now();
  auto saturating_add = [](Clock::time_point t, Millis d) -> std::optional<Clock::time_point> {
    if (d == kUnlimited) return std::nullopt;
    return t + d;
  };
  const auto global_deadline = saturating_add(start, config.time_limit);

  FillResult result;
  result.total_slots = static_cast<int>(slots.size());
  result.target_rate = config.target_rate;

  const std::uint64_t cap = config.episode_cap();
  for (std::uint64_t episode = 0;; ++episode) {
    FillState state(slots, index, config.forbid_duplicate_answers);
    std::optional<Clock::time_point> deadline;
    std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max();
    if (config.deterministic()) {
      node_limit = *config.node_budget;
    } else {
      deadline = saturating_add(Clock::now(), config.restart_interval);
      if (global_deadline && (!deadline || *global_deadline < *deadline)) deadline = global_deadline;
    }
    detail::Episode run(state, config, derive_seed(config.seed, {episode}), node_limit, deadline);
    auto outcome = run.run();
    result.nodes_expanded += run.nodes();
    if (run.deepest_assigned() > result.deepest_assigned ||
        (run.deepest_assigned() == result.deepest_assigned && run.deepest_topic() > result.deepest_topic)) {
      result.deepest_assigned = run.deepest_assigned();
      result.deepest_topic = run.deepest_topic();
    }
    result.restarts = episode;

    bool stop = false;
    if (outcome == detail::EpisodeOutcome::Success) {
      result.status = FillStatus::Success;
      result.assignment = state.assignment();
      result.topic_count = state.topic_count();
      stop = true;
    } else if (outcome == detail::EpisodeOutcome::Exhausted) {
      result.status = FillStatus::Exhausted;
      stop = true;
    } else if (config.deterministic() ? episode + 1 >= cap
                                      : (global_deadline && Clock::now() >= *global_deadline)) {
      result.status = FillStatus::Timeout;
      stop = true;
    }
    if (stop) break;
  }
  result.wall_time = std::chrono::duration_cast<Millis>(Clock::now() - start);
  if (config.deterministic()) {
    // Virtual time: one full node budget stands for one restart interval.
    long double per_node = static_cast<long double>(config.restart_interval.count()) / *config.node_budget;
    result.elapsed = Millis(static_cast<Millis::rep>(per_node * result.nodes_expanded));
  } else {
    result.elapsed = result.wall_time;
  }
  return result;
}

/// Fills every slot with at least target_rate % Topic answers.
inline FillResult solve(const SlotSet& slots, const WordIndex& index, const SolverConfig& config) {
  return run_with_restarts(slots, index, config);
}

/// Anytime maximization: after each success, demand `step` more percentage
/// points than achieved and re-solve, until failure, T > 100, or the shared
/// time budget runs out. Returns the best success (or the first failure).
inline FillResult maximize_topic_rate(const SlotSet& slots, const WordIndex& index, const SolverConfig& config,
                                      int step = 10) {
  using Clock = std::chrono::steady_clock;
  if (step < 1) throw Error(ErrorCode::InvalidConfig, "step must be positive");
  config.validate();
  const auto start = Clock::now();
  SolverConfig round = config;
  std::optional<FillResult> best;
  FillResult last;
  std::uint64_t episodes_used = 0;
  std::uint64_t nodes = 0;
  Millis virtual_elapsed{0};
  for (int iteration = 0;; ++iteration) {
    round.seed = derive_seed(config.seed, {0x6D6178ULL, static_cast<std::uint64_t>(iteration)});
    if (iteration == 0) round.seed = config.seed;
    last = solve(slots, index, round);
    episodes_used += last.episodes();
    nodes += last.nodes_expanded;
    virtual_elapsed += last.elapsed;
    if (!last.success()) break;
    best = last;
    if (last.topic_count == last.total_slots) break;
    const int achieved_pct = 100 * last.topic_count / last.total_slots;
    const int next = std::max(round.target_rate + 1, achieved_pct + step);
    if (next > 100) break;
    round.target_rate = next;
    // Shared budget across rounds.
    if (config.deterministic()) {
      const auto cap = config.episode_cap();
      if (episodes_used >= cap) break;
      if (config.time_limit != kUnlimited) round.time_limit = config.restart_interval * static_cast<long>(cap - episodes_used);
    } else if (config.time_limit != kUnlimited) {
      auto spent = std::chrono::duration_cast<Millis>(Clock::now() - start);
      if (spent >= config.time_limit) break;
      round.time_limit = config.time_limit - spent;
      if (round.restart_interval > round.time_limit) round.restart_interval = round.time_limit;
    }
  }
  FillResult out = best ? *best : last;
  out.nodes_expanded = nodes;
  out.wall_time = std::chrono::duration_cast<Millis>(Clock::now() - start);
  out.elapsed = config.deterministic() ? virtual_elapsed : out.wall_time;
  return out;
}

/// {"status", "ratio", "elapsed_ms", "restarts", "nodes_expanded", "assignment": {slot_id: answer}}
inline nlohmann::json to_json(const FillResult& r, const WordIndex& index) {
  nlohmann::json doc;
  doc["status"] = to_string(r.status);
  doc["ratio"] = r.achieved_topic_ratio();
  doc["elapsed_ms"] = r.elapsed.count();
  doc["restarts"] = r.restarts;
  doc["nodes_expanded"] = r.nodes_expanded;
  nlohmann::json assignment = nlohmann::json::object();
  for (size_t s = 0; s < r.assignment.size(); ++s) {
    assignment[std::to_string(s)] = index.entry(r.assignment[s]).answer;
  }
  doc["assignment"] = assignment;
  return doc;
}

}  // namespace xwgen
