#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xwgen/lexicon.hpp"

namespace xwgen {

using EntryId = std::uint32_t;

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(size_t bits, bool value = false)
      : bits_(bits), words_((bits + 63) / 64, value ? ~std::uint64_t{0} : 0) {
    trim();
  }

  size_t size() const { return bits_; }
  size_t word_count() const { return words_.size(); }

  void set(size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  void assign(const Bitset& other) {
    bits_ = other.bits_;
    words_.assign(other.words_.begin(), other.words_.end());
  }
  void fill(bool value) {
    std::fill(words_.begin(), words_.end(), value ? ~std::uint64_t{0} : 0);
    trim();
  }
  Bitset& operator&=(const Bitset& o) {
    for (size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  Bitset& and_not(const Bitset& o) {
    for (size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
    return *this;
  }

  size_t count() const {
    size_t n = 0;
    for (auto w : words_) n += static_cast<size_t>(std::popcount(w));
    return n;
  }

  /// Counts bits in (*this & a & ~b) without materializing the result.
  size_t count_and_not(const Bitset& b) const {
    size_t n = 0;
    for (size_t k = 0; k < words_.size(); ++k) n += static_cast<size_t>(std::popcount(words_[k] & ~b.words_[k]));
    return n;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (size_t k = 0; k < words_.size(); ++k) {
      auto w = words_[k];
      while (w) {
        f(k * 64 + static_cast<size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  void trim() {
    if (bits_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (bits_ % 64)) - 1;
  }

  size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A fixed letter at a position inside a slot.
struct LetterConstraint {
  int position = 0;
  char32_t letter = 0;

  friend bool operator==(const LetterConstraint&, const LetterConstraint&) = default;
  friend auto operator<=>(const LetterConstraint&, const LetterConstraint&) = default;
};

/// All words of one length. `order` is the canonical candidate order (Topic
/// first, then by answer); bit k in every bitset refers to order[k].
struct LengthBucket {
  int length = 0;
  std::vector<EntryId> order;
  size_t topic_count = 0;
  std::vector<std::unordered_map<char32_t, Bitset>> by_position;
};

/// (length, position, letter) index over a Lexicon. The lexicon must outlive it.
class WordIndex {
 public:
  WordIndex() = default;

  explicit WordIndex(const Lexicon& lexicon) : lexicon_(&lexicon) {
    std::map<int, std::vector<EntryId>> topic, filler;
    for (EntryId id = 0; id < lexicon.size(); ++id) {
      const auto& e = lexicon[id];
      (e.source == Source::Topic ? topic : filler)[e.length()].push_back(id);
    }
    std::set<int> lengths;
    for (const auto& [len, ids] : topic) lengths.insert(len);
    for (const auto& [len, ids] : filler) lengths.insert(len);
    rank_.assign(lexicon.size(), 0);
    for (int len : lengths) {
      LengthBucket b;
      b.length = len;
      b.order = topic[len];
      b.topic_count = b.order.size();
      const auto& f = filler[len];
      b.order.insert(b.order.end(), f.begin(), f.end());
      b.by_position.resize(static_cast<size_t>(len));
      for (size_t k = 0; k < b.order.size(); ++k) {
        const auto& letters = lexicon[b.order[k]].letters;
        rank_[b.order[k]] = static_cast<std::uint32_t>(k);
        for (int i = 0; i < len; ++i) {
          auto [it, inserted] = b.by_position[static_cast<size_t>(i)].try_emplace(letters[static_cast<size_t>(i)]);
          if (inserted) it->second = Bitset(b.order.size());
          it->second.set(k);
        }
      }
      buckets_.emplace(len, std::move(b));
    }
  }

  const Lexicon& lexicon() const { return *lexicon_; }
  const LexiconEntry& entry(EntryId id) const { return (*lexicon_)[id]; }

  const LengthBucket* bucket(int length) const {
    auto it = buckets_.find(length);
    return it == buckets_.end() ? nullptr : &it->second;
  }

  std::vector<int> lengths() const {
    std::vector<int> out;
    for (const auto& [len, b] : buckets_) out.push_back(len);
    return out;
  }

  /// Rank of an entry inside its length bucket.
  std::uint32_t rank(EntryId id) const { return rank_[id]; }

  /// Words of the given length in canonical order.
  std::vector<EntryId> by_length(int length) const {
    const auto* b = bucket(length);
    return b ? b->order : std::vector<EntryId>{};
  }

  /// Words of the given length with `letter` at `position`, canonical order.
  std::vector<EntryId> by_constraint(int length, int position, char32_t letter) const {
    std::vector<EntryId> out;
    const auto* b = bucket(length);
    if (!b || position < 0 || position >= length) return out;
    auto it = b->by_position[static_cast<size_t>(position)].find(letter);
    if (it == b->by_position[static_cast<size_t>(position)].end()) return out;
    it->second.for_each([&](size_t k) { out.push_back(b->order[k]); });
    return out;
  }

  /// Writes into `out` the bucket members matching every constraint. Returns
  /// false (leaving `out` unspecified) when some letter never occurs.
  bool match(const LengthBucket& b, std::span<const LetterConstraint> fixed, Bitset& out) const {
    if (fixed.empty()) {
      if (out.size() != b.order.size()) out = Bitset(b.order.size());
      out.fill(true);
      return true;
    }
    bool first = true;
    for (const auto& c : fixed) {
      const auto& column = b.by_position[static_cast<size_t>(c.position)];
      auto it = column.find(c.letter);
      if (it == column.end()) return false;
      if (first) {
        out.assign(it->second);
        first = false;
      } else {
        out &= it->second;
      }
    }
    return true;
  }

 private:
  const Lexicon* lexicon_ = nullptr;
  std::map<int, LengthBucket> buckets_;
  std::vector<std::uint32_t> rank_;
};

inline WordIndex build_index(const Lexicon& lexicon) { return WordIndex(lexicon); }

/// Entries of `length` matching all fixed letters and not excluded, Topic
/// first then by answer.
inline std::vector<EntryId> candidates(const WordIndex& index, int length,
                                       std::span<const LetterConstraint> fixed,
                                       const std::set<std::string>& excluded = {}) {
  std::vector<EntryId> out;
  const auto* b = index.bucket(length);
  if (!b) return out;
  for (const auto& c : fixed) {
    if (c.position < 0 || c.position >= length) {
      throw Error(ErrorCode::InvalidConfig, "constraint position outside word length");
    }
  }
  Bitset bits;
  if (!index.match(*b, fixed, bits)) return out;
  bits.for_each([&](size_t k) {
    EntryId id = b->order[k];
    if (!excluded.count(index.entry(id).answer)) out.push_back(id);
  });
  return out;
}

}  // namespace xwgen
