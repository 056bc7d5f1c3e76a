#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polarize/state_space.hpp"

namespace polarize {

/// One letter of a word: a coordinate of one state space, or that space's
/// unit functional.
struct Letter {
  int space = 0;
  int coord = -1;  // -1 is the unit letter

  static Letter unit(int space) { return Letter{space, -1}; }
  static Letter coordinate(int space, int coord) { return Letter{space, coord}; }
  bool is_unit() const { return coord < 0; }

  auto operator<=>(const Letter&) const = default;
};

/// Symmetrized moment index: for each state space the multiset of
/// coordinate letters in the word, as a sorted list. Unit letters are the
/// implicit padding up to `level` slots per space.
struct MomentIndex {
  int level = 0;
  std::vector<std::vector<int>> per_space;

  int letters_in(int space) const { return static_cast<int>(per_space[static_cast<std::size_t>(space)].size()); }

  bool operator==(const MomentIndex&) const = default;
  /// Lexicographic over spaces, then over each sorted multiset (a proper
  /// prefix sorts first). The level takes part only as a final tie-break.
  std::strong_ordering operator<=>(const MomentIndex& other) const;
};

/// Canonical index of a word. Unit letters are dropped and the order of
/// `letters` does not matter. Throws LevelOverflow if some space receives
/// more than `level` coordinate letters, UnknownLetter for letters outside
/// `spaces`.
MomentIndex canonical_index(int level, std::span<const Letter> letters,
                            std::span<const StateSpace> spaces);

/// Canonical index of base's multiset plus `extra`, at base's level.
MomentIndex extend_index(const MomentIndex& base, std::span<const Letter> extra,
                         std::span<const StateSpace> spaces);

/// Every canonical index at `level`, strictly increasing.
std::vector<MomentIndex> enumerate_indices(int level, std::span<const StateSpace> spaces);

/// Closed form prod_s multichoose(free_dim_s + 1, level). Throws
/// CapacityError on 64-bit overflow.
std::uint64_t count_indices(int level, std::span<const StateSpace> spaces);

/// Number of size-k multisets from an n-letter alphabet, C(n+k-1, k).
std::uint64_t multichoose(std::uint64_t n, std::uint64_t k);

/// "y[" + per-space "+"-joined letter names joined by ";" + "]".
std::string canonical_name(const MomentIndex& index, std::span<const StateSpace> spaces);

/// Dense numbering of all indices at one level, with O(1) extension by a
/// letter. Ids follow the enumerate_indices order, so they double as LP
/// column numbers.
class MomentIndexer {
 public:
  MomentIndexer(int level, std::span<const StateSpace> spaces);

  int level() const { return level_; }
  int num_spaces() const { return static_cast<int>(tables_.size()); }
  std::int64_t size() const { return size_; }

  /// Id of the index whose per-space multisets are given by per-space
  /// ranks; see rank_of.
  std::int64_t id(const MomentIndex& index) const;
  MomentIndex index(std::int64_t id) const;

  /// Id after adding coordinate `coord` of `space`, or -1 when that space
  /// has no free slot left.
  std::int64_t extend(std::int64_t id, int space, int coord) const {
    const auto& t = tables_[static_cast<std::size_t>(space)];
    const std::int64_t rank = (id / t.stride) % t.count;
    const std::int32_t next = t.transition[static_cast<std::size_t>(rank * t.alphabet + coord)];
    if (next < 0) return -1;
    return id + (next - rank) * t.stride;
  }

  int letters_in(std::int64_t id, int space) const {
    const auto& t = tables_[static_cast<std::size_t>(space)];
    return t.sizes[static_cast<std::size_t>((id / t.stride) % t.count)];
  }

  /// Number of multisets (of size <= level) of one space.
  std::int64_t space_count(int space) const { return tables_[static_cast<std::size_t>(space)].count; }

  /// Per-space rank of `id` and the multiset it stands for.
  std::int64_t rank_in(std::int64_t id, int space) const {
    const auto& t = tables_[static_cast<std::size_t>(space)];
    return (id / t.stride) % t.count;
  }
  const std::vector<int>& multiset(int space, std::int64_t rank) const {
    return tables_[static_cast<std::size_t>(space)].multisets[static_cast<std::size_t>(rank)];
  }

  std::string name(std::int64_t id, std::span<const StateSpace> spaces) const;

 private:
  struct SpaceTable {
    std::int64_t alphabet = 0;  // number of coordinate letters
    std::int64_t count = 0;     // number of multisets of size <= level
    std::int64_t stride = 1;
    std::vector<std::vector<int>> multisets;
    std::vector<int> sizes;
    std::vector<std::int32_t> transition;  // count x alphabet, -1 when full
  };

  std::int64_t rank_of(int space, const std::vector<int>& multiset) const;

  int level_;
  std::int64_t size_ = 1;
  std::vector<SpaceTable> tables_;
};

}  // namespace polarize
