#include <map>

#include "hierarchy_detail.hpp"
#include "polarize/error.hpp"

namespace polarize::reference {

namespace {

using Entries = std::vector<std::pair<int, double>>;

void multisets_upto(int alphabet, int level, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  out.push_back(current);
  if (static_cast<int>(current.size()) == level) return;
  const int first = current.empty() ? 0 : current.back();
  for (int c = first; c < alphabet; ++c) {
    current.push_back(c);
    multisets_upto(alphabet, level, current, out);
    current.pop_back();
  }
}

std::map<MomentIndex, int> number_indices(int level, std::span<const StateSpace> spaces) {
  std::vector<std::vector<std::vector<int>>> per_space;
  for (const auto& s : spaces) {
    std::vector<int> cur;
    per_space.emplace_back();
    multisets_upto(s.free_dim(), level, cur, per_space.back());
  }
  std::map<MomentIndex, int> ids;
  MomentIndex index{level, std::vector<std::vector<int>>(spaces.size())};
  auto rec = [&](auto&& self, std::size_t s) -> void {
    if (s == spaces.size()) {
      ids.emplace(index, 0);
      return;
    }
    for (const auto& ms : per_space[s]) {
      index.per_space[s] = ms;
      self(self, s + 1);
    }
  };
  rec(rec, 0);
  int k = 0;
  for (auto& [idx, id] : ids) id = k++;
  return ids;
}

std::vector<Letter> term_letters(const AffineTerm& t) { return t.letters; }

}  // namespace

LinearProgram build_lp(const Problem& problem, const HierarchySpec& spec) {
  detail::check_spec(problem, spec);
  const std::span<const StateSpace> spaces(problem.spaces);
  const int n = spec.level;
  const int m = static_cast<int>(spaces.size());
  const auto ids = number_indices(n, spaces);
  auto id_of = [&](const MomentIndex& base, std::span<const Letter> extra) {
    return ids.at(extend_index(base, extra, spaces));
  };

  LinearProgram lp;
  std::vector<double> lower;
  for (const auto& [idx, id] : ids) {
    const bool empty = id == 0;
    const Interval r = empty ? Interval{1.0, 1.0} : detail::word_range(spaces, idx);
    int grade = 0;
    for (const auto& ms : idx.per_space) grade += static_cast<int>(ms.size());
    lp.add_variable(canonical_name(idx, spaces), r.lo, r.hi, grade);
    lower.push_back(r.lo);
  }

  std::vector<std::vector<bool>> nonneg;
  for (const auto& s : spaces) nonneg.push_back(detail::nonnegative_letters(s));
  std::vector<std::vector<int>> needs;
  for (int r = 0; r < problem.constraint_map.output_dim(); ++r) {
    needs.push_back(detail::slots_needed(problem.constraint_map, r, m));
  }

  const bool plus = spec.variant == Variant::Plus;
  const bool extensions = spec.family == ConstraintFamily::FacetExtensions;
  RowBlock block;
  Entries entries;

  for (const auto& [w, wid] : ids) {
    if (extensions) {
      bool ok = true;
      for (int s = 0; s < m; ++s) {
        for (int c : w.per_space[static_cast<std::size_t>(s)]) {
          ok = ok && nonneg[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
        }
      }
      for (int s = 0; s < m && ok; ++s) {
        if (w.letters_in(s) > n - 1) continue;
        for (const auto& g : spaces[static_cast<std::size_t>(s)].facets()) {
          entries.clear();
          if (g.constant != 0.0) entries.emplace_back(wid, g.constant);
          for (const auto& [i, v] : g.coefficients) {
            const Letter l = Letter::coordinate(s, i);
            entries.emplace_back(id_of(w, {&l, 1}), v);
          }
          if (detail::implied_by_bounds(entries, lower)) continue;
          block.add(entries, Relation::GreaterEqual, 0.0, RowKind::Facet);
        }
      }
    }
    if (plus) {
      for (int r = 0; r < problem.constraint_map.output_dim(); ++r) {
        bool fits = true;
        for (int s = 0; s < m; ++s) {
          fits = fits && w.letters_in(s) <= n - needs[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
        }
        if (!fits) continue;
        entries.clear();
        for (const auto& t : problem.constraint_map.terms(r)) {
          entries.emplace_back(id_of(w, term_letters(t)), t.coeff);
        }
        block.add(entries, Relation::Equal, 0.0, RowKind::ConstraintMap);
      }
    }
  }

  if (!extensions) {
    // per space: every multiset of at most n facets
    std::vector<std::vector<std::vector<int>>> facet_sets(static_cast<std::size_t>(m));
    for (int s = 0; s < m; ++s) {
      std::vector<int> cur;
      multisets_upto(static_cast<int>(spaces[static_cast<std::size_t>(s)].facets().size()), n, cur,
                     facet_sets[static_cast<std::size_t>(s)]);
    }
    using Poly = std::vector<std::pair<std::vector<Letter>, double>>;
    std::vector<std::size_t> choice(static_cast<std::size_t>(m), 0);
    bool first = true;
    while (true) {
      if (!first) {
        // odometer, last space fastest
        int s = m - 1;
        while (s >= 0 && ++choice[static_cast<std::size_t>(s)] == facet_sets[static_cast<std::size_t>(s)].size()) {
          choice[static_cast<std::size_t>(s)] = 0;
          --s;
        }
        if (s < 0) break;
      }
      first = false;
      if (std::all_of(choice.begin(), choice.end(), [](std::size_t c) { return c == 0; })) continue;
      Poly acc{{{}, 1.0}};
      for (int s = 0; s < m; ++s) {
        Poly part{{{}, 1.0}};
        for (int f : facet_sets[static_cast<std::size_t>(s)][choice[static_cast<std::size_t>(s)]]) {
          const auto& g = spaces[static_cast<std::size_t>(s)].facets()[static_cast<std::size_t>(f)];
          Poly next;
          for (const auto& [letters, c] : part) {
            if (g.constant != 0.0) next.emplace_back(letters, c * g.constant);
            for (const auto& [i, v] : g.coefficients) {
              auto l2 = letters;
              l2.push_back(Letter::coordinate(s, i));
              next.emplace_back(std::move(l2), c * v);
            }
          }
          part = std::move(next);
        }
        Poly combined;
        for (const auto& [la, ca] : acc) {
          for (const auto& [lb, cb] : part) {
            auto l = la;
            l.insert(l.end(), lb.begin(), lb.end());
            combined.emplace_back(std::move(l), ca * cb);
          }
        }
        acc = std::move(combined);
      }
      entries.clear();
      for (const auto& [letters, c] : acc) entries.emplace_back(ids.at(canonical_index(n, letters, spaces)), c);
      if (detail::implied_by_bounds(entries, lower)) continue;
      block.add(entries, Relation::GreaterEqual, 0.0, RowKind::Facet);
    }
  }

  if (!plus) {
    const auto& f = problem.constraint_map;
    const MomentIndex empty{n, std::vector<std::vector<int>>(static_cast<std::size_t>(m))};
    for (const auto& group : detail::polarized_groups(f, spec.pi)) {
      entries.clear();
      for (const auto& [r, r2] : group) {
        for (const auto& t : f.terms(r)) {
          for (const auto& t2 : f.terms(r2)) {
            auto letters = t.letters;
            letters.insert(letters.end(), t2.letters.begin(), t2.letters.end());
            entries.emplace_back(id_of(empty, letters), t.coeff * t2.coeff);
          }
        }
      }
      block.add(entries, Relation::Equal, 0.0, RowKind::Polarized);
    }
  }
  lp.append(block);

  entries.clear();
  double constant = 0.0;
  const MomentIndex empty{n, std::vector<std::vector<int>>(static_cast<std::size_t>(m))};
  for (const auto& t : problem.objective.terms(0)) {
    if (t.letters.empty()) {
      constant += t.coeff;
    } else {
      entries.emplace_back(id_of(empty, t.letters), t.coeff);
    }
  }
  RowBlock merged;
  std::vector<int> cols;
  std::vector<double> vals;
  if (merged.add(entries, Relation::Equal, 0.0, RowKind::Generic)) {
    cols = merged.column;
    vals = merged.value;
  }
  lp.set_objective(cols, vals, constant);
  return lp;
}

}  // namespace polarize::reference
