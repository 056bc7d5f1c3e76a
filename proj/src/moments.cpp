#include "polarize/moments.hpp"

#include <algorithm>
#include <limits>

#include "polarize/error.hpp"

namespace polarize {

std::strong_ordering MomentIndex::operator<=>(const MomentIndex& other) const {
  if (auto c = per_space <=> other.per_space; c != 0) return c;
  return level <=> other.level;
}

namespace {

void check_letter(const Letter& l, std::span<const StateSpace> spaces) {
  if (l.space < 0 || l.space >= static_cast<int>(spaces.size())) {
    throw Error(ErrorKind::UnknownLetter, "letter refers to space " + std::to_string(l.space) + " of " +
                                              std::to_string(spaces.size()));
  }
  if (!l.is_unit() && l.coord >= spaces[static_cast<std::size_t>(l.space)].free_dim()) {
    throw Error(ErrorKind::UnknownLetter,
                "coordinate " + std::to_string(l.coord) + " outside space '" +
                    spaces[static_cast<std::size_t>(l.space)].name() + "'");
  }
}

void add_letters(MomentIndex& index, std::span<const Letter> letters, std::span<const StateSpace> spaces) {
  for (const auto& l : letters) {
    check_letter(l, spaces);
    if (l.is_unit()) continue;
    auto& ms = index.per_space[static_cast<std::size_t>(l.space)];
    ms.insert(std::upper_bound(ms.begin(), ms.end(), l.coord), l.coord);
    if (static_cast<int>(ms.size()) > index.level) {
      throw Error(ErrorKind::LevelOverflow,
                  "space '" + spaces[static_cast<std::size_t>(l.space)].name() + "' receives more than " +
                      std::to_string(index.level) + " letters");
    }
  }
}

// Depth-first preorder over sorted sequences, which is lexicographic order
// with proper prefixes first.
void enumerate_multisets(int alphabet, int level, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  out.push_back(current);
  if (static_cast<int>(current.size()) == level) return;
  const int first = current.empty() ? 0 : current.back();
  for (int c = first; c < alphabet; ++c) {
    current.push_back(c);
    enumerate_multisets(alphabet, level, current, out);
    current.pop_back();
  }
}

}  // namespace

MomentIndex canonical_index(int level, std::span<const Letter> letters, std::span<const StateSpace> spaces) {
  if (level < 0) throw Error(ErrorKind::InvalidArgument, "level must be nonnegative");
  MomentIndex index{level, std::vector<std::vector<int>>(spaces.size())};
  add_letters(index, letters, spaces);
  return index;
}

MomentIndex extend_index(const MomentIndex& base, std::span<const Letter> extra,
                         std::span<const StateSpace> spaces) {
  if (base.per_space.size() != spaces.size()) {
    throw Error(ErrorKind::DimensionMismatch, "index and space list disagree on the number of spaces");
  }
  MomentIndex index = base;
  add_letters(index, extra, spaces);
  return index;
}

std::vector<MomentIndex> enumerate_indices(int level, std::span<const StateSpace> spaces) {
  const MomentIndexer indexer(level, spaces);
  std::vector<MomentIndex> out;
  out.reserve(static_cast<std::size_t>(indexer.size()));
  for (std::int64_t id = 0; id < indexer.size(); ++id) out.push_back(indexer.index(id));
  return out;
}

std::uint64_t multichoose(std::uint64_t n, std::uint64_t k) {
  if (k == 0) return 1;
  if (n == 0) return 0;
  // C(n+k-1, k) built incrementally; each partial product is itself a
  // binomial coefficient, so the division is exact.
  const std::uint64_t top = n + k - 1;
  const std::uint64_t kk = std::min(k, n - 1);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= kk; ++i) {
    result = result * (top - kk + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorKind::CapacityError, "multichoose overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t count_indices(int level, std::span<const StateSpace> spaces) {
  if (level < 0) throw Error(ErrorKind::InvalidArgument, "level must be nonnegative");
  unsigned __int128 total = 1;
  for (const auto& s : spaces) {
    total *= multichoose(static_cast<std::uint64_t>(s.alphabet_size()), static_cast<std::uint64_t>(level));
    if (total > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorKind::CapacityError, "index count overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(total);
}

std::string canonical_name(const MomentIndex& index, std::span<const StateSpace> spaces) {
  if (index.per_space.size() != spaces.size()) {
    throw Error(ErrorKind::DimensionMismatch, "index and space list disagree on the number of spaces");
  }
  std::string out = "y[";
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    if (s > 0) out += ';';
    const auto& ms = index.per_space[s];
    for (std::size_t k = 0; k < ms.size(); ++k) {
      if (k > 0) out += '+';
      out += spaces[s].letter_names()[static_cast<std::size_t>(ms[k])];
    }
  }
  out += ']';
  return out;
}

MomentIndexer::MomentIndexer(int level, std::span<const StateSpace> spaces) : level_(level) {
  if (level < 0) throw Error(ErrorKind::InvalidArgument, "level must be nonnegative");
  const std::uint64_t total = count_indices(level, spaces);
  if (total > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
    throw Error(ErrorKind::CapacityError,
                "level " + std::to_string(level) + " needs " + std::to_string(total) +
                    " moment variables, more than an LP column index can address");
  }
  size_ = static_cast<std::int64_t>(total);
  tables_.resize(spaces.size());
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    auto& t = tables_[s];
    t.alphabet = spaces[s].free_dim();
    std::vector<int> scratch;
    enumerate_multisets(spaces[s].free_dim(), level, scratch, t.multisets);
    t.count = static_cast<std::int64_t>(t.multisets.size());
    t.sizes.reserve(t.multisets.size());
    for (const auto& ms : t.multisets) t.sizes.push_back(static_cast<int>(ms.size()));
    t.transition.assign(static_cast<std::size_t>(t.count * t.alphabet), -1);
  }
  std::int64_t stride = 1;
  for (std::size_t s = tables_.size(); s-- > 0;) {
    tables_[s].stride = stride;
    stride *= tables_[s].count;
  }
  for (std::size_t s = 0; s < tables_.size(); ++s) {
    auto& t = tables_[s];
    for (std::int64_t r = 0; r < t.count; ++r) {
      const auto& ms = t.multisets[static_cast<std::size_t>(r)];
      if (static_cast<int>(ms.size()) == level) continue;
      for (int c = 0; c < t.alphabet; ++c) {
        std::vector<int> next = ms;
        next.insert(std::upper_bound(next.begin(), next.end(), c), c);
        t.transition[static_cast<std::size_t>(r * t.alphabet + c)] =
            static_cast<std::int32_t>(rank_of(static_cast<int>(s), next));
      }
    }
  }
}

std::int64_t MomentIndexer::rank_of(int space, const std::vector<int>& multiset) const {
  const auto& list = tables_[static_cast<std::size_t>(space)].multisets;
  const auto it = std::lower_bound(list.begin(), list.end(), multiset);
  if (it == list.end() || *it != multiset) {
    throw Error(ErrorKind::LevelOverflow, "multiset is not an index at level " + std::to_string(level_));
  }
  return it - list.begin();
}

std::int64_t MomentIndexer::id(const MomentIndex& index) const {
  if (index.per_space.size() != tables_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "index and indexer disagree on the number of spaces");
  }
  std::int64_t out = 0;
  for (std::size_t s = 0; s < tables_.size(); ++s) {
    out += rank_of(static_cast<int>(s), index.per_space[s]) * tables_[s].stride;
  }
  return out;
}

MomentIndex MomentIndexer::index(std::int64_t id) const {
  MomentIndex out{level_, {}};
  out.per_space.reserve(tables_.size());
  for (std::size_t s = 0; s < tables_.size(); ++s) {
    out.per_space.push_back(multiset(static_cast<int>(s), rank_in(id, static_cast<int>(s))));
  }
  return out;
}

std::string MomentIndexer::name(std::int64_t id, std::span<const StateSpace> spaces) const {
  return canonical_name(index(id), spaces);
}

}  // namespace polarize
