#include "polarize/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "hierarchy_detail.hpp"
#include "polarize/error.hpp"

namespace polarize {

namespace detail {

Interval word_range(std::span<const StateSpace> spaces, const MomentIndex& index) {
  Interval acc{1.0, 1.0};
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    for (int c : index.per_space[s]) {
      const Interval& r = spaces[s].coordinate_range(c);
      const double p[] = {acc.lo * r.lo, acc.lo * r.hi, acc.hi * r.lo, acc.hi * r.hi};
      acc = Interval{*std::min_element(std::begin(p), std::end(p)), *std::max_element(std::begin(p), std::end(p))};
    }
  }
  return acc;
}

std::vector<bool> nonnegative_letters(const StateSpace& space) {
  std::vector<bool> out(static_cast<std::size_t>(space.free_dim()));
  for (int i = 0; i < space.free_dim(); ++i) {
    out[static_cast<std::size_t>(i)] = space.coordinate_range(i).lo >= -space.tolerance();
  }
  return out;
}

std::vector<int> slots_needed(const AffineMap& map, int output, int num_spaces) {
  std::vector<int> need(static_cast<std::size_t>(num_spaces), 0);
  for (const auto& t : map.terms(output)) {
    for (const auto& l : t.letters) need[static_cast<std::size_t>(l.space)] = 1;
  }
  return need;
}

std::vector<std::vector<std::pair<int, int>>> polarized_groups(const AffineMap& map, PolarizationKind kind) {
  const int q = map.output_dim();
  std::vector<std::vector<std::pair<int, int>>> groups;
  switch (kind) {
    case PolarizationKind::Identity:
      for (int r = 0; r < q; ++r) {
        for (int r2 = 0; r2 < q; ++r2) groups.push_back({{r, r2}});
      }
      break;
    case PolarizationKind::HilbertSchmidt: {
      std::vector<std::pair<int, int>> diag;
      for (int r = 0; r < q; ++r) diag.emplace_back(r, r);
      groups.push_back(std::move(diag));
      break;
    }
    case PolarizationKind::MatrixProduct: {
      if (!map.shape()) {
        throw Error(ErrorKind::ShapeRequired, "matrix-product polarization needs an output shape");
      }
      const auto [rows, cols] = *map.shape();
      for (int j = 0; j < cols; ++j) {
        for (int k = 0; k < cols; ++k) {
          std::vector<std::pair<int, int>> g;
          for (int i = 0; i < rows; ++i) g.emplace_back(i * cols + j, i * cols + k);
          groups.push_back(std::move(g));
        }
      }
      break;
    }
  }
  return groups;
}

void check_spec(const Problem& problem, const HierarchySpec& spec) {
  problem.validate();
  if (spec.level < 1) throw Error(ErrorKind::LevelTooLow, "hierarchy level must be at least 1");
  if (spec.variant == Variant::Polarized) {
    if (spec.level < 2) {
      throw Error(ErrorKind::LevelTooLow, "the polarized variant constrains the two-copy marginal; level must be >= 2");
    }
    if (spec.pi == PolarizationKind::MatrixProduct && !problem.constraint_map.shape()) {
      throw Error(ErrorKind::ShapeRequired, "matrix-product polarization needs an output shape");
    }
  }
  const int per_output = spec.variant == Variant::Polarized ? 2 : 1;
  const int m = static_cast<int>(problem.spaces.size());
  for (int r = 0; r < problem.constraint_map.output_dim(); ++r) {
    for (int need : slots_needed(problem.constraint_map, r, m)) {
      if (need * per_output > spec.level) {
        throw Error(ErrorKind::CapacityError, "constraint map needs more slots than level provides");
      }
    }
  }
}

bool implied_by_bounds(const std::vector<std::pair<int, double>>& entries, const std::vector<double>& lower) {
  return std::all_of(entries.begin(), entries.end(), [&](const auto& e) {
    return e.second >= 0.0 && lower[static_cast<std::size_t>(e.first)] >= 0.0;
  });
}

}  // namespace detail

namespace {

using Entries = std::vector<std::pair<int, double>>;

/// Per-space expansion of a product of facets as (rank, coefficient)
/// pairs, in generation order and without merging.
std::vector<std::pair<std::int64_t, double>> expand_facet_product(const MomentIndexer& indexer, int space,
                                                                  const StateSpace& ss,
                                                                  const std::vector<int>& facet_multiset) {
  std::vector<std::pair<std::int64_t, double>> poly{{0, 1.0}};
  // rank -> id conversion: a lone space's rank times its stride is its id
  // contribution, so work in id units of that space directly.
  for (int f : facet_multiset) {
    const auto& g = ss.facets()[static_cast<std::size_t>(f)];
    std::vector<std::pair<std::int64_t, double>> next;
    for (const auto& [id, c] : poly) {
      if (g.constant != 0.0) next.emplace_back(id, c * g.constant);
      for (const auto& [i, v] : g.coefficients) next.emplace_back(indexer.extend(id, space, i), c * v);
    }
    poly = std::move(next);
  }
  return poly;
}

struct BuildContext {
  const Problem& problem;
  const HierarchySpec& spec;
  const MomentIndexer& indexer;
  std::vector<std::vector<bool>> nonneg;        // per space, per coordinate
  std::vector<std::vector<bool>> word_nonneg;   // per space, per rank
  std::vector<std::vector<int>> map_needs;      // per output
  std::vector<double> lower;

  bool all_letters_nonnegative(std::int64_t id) const {
    for (int s = 0; s < indexer.num_spaces(); ++s) {
      if (!word_nonneg[static_cast<std::size_t>(s)][static_cast<std::size_t>(indexer.rank_in(id, s))]) return false;
    }
    return true;
  }
};

void facet_extension_rows(const BuildContext& ctx, std::int64_t w, RowBlock& block, Entries& entries) {
  const int n = ctx.spec.level;
  if (!ctx.all_letters_nonnegative(w)) return;
  for (int s = 0; s < ctx.indexer.num_spaces(); ++s) {
    if (ctx.indexer.letters_in(w, s) > n - 1) continue;
    for (const auto& g : ctx.problem.spaces[static_cast<std::size_t>(s)].facets()) {
      entries.clear();
      if (g.constant != 0.0) entries.emplace_back(static_cast<int>(w), g.constant);
      for (const auto& [i, v] : g.coefficients) {
        entries.emplace_back(static_cast<int>(ctx.indexer.extend(w, s, i)), v);
      }
      if (detail::implied_by_bounds(entries, ctx.lower)) continue;
      block.add(entries, Relation::GreaterEqual, 0.0, RowKind::Facet);
    }
  }
}

void constraint_map_rows(const BuildContext& ctx, std::int64_t w, RowBlock& block, Entries& entries) {
  const int n = ctx.spec.level;
  const auto& f = ctx.problem.constraint_map;
  for (int r = 0; r < f.output_dim(); ++r) {
    const auto& need = ctx.map_needs[static_cast<std::size_t>(r)];
    bool fits = true;
    for (int s = 0; s < ctx.indexer.num_spaces() && fits; ++s) {
      fits = ctx.indexer.letters_in(w, s) <= n - need[static_cast<std::size_t>(s)];
    }
    if (!fits) continue;
    entries.clear();
    for (const auto& t : f.terms(r)) {
      std::int64_t target = w;
      for (const auto& l : t.letters) target = ctx.indexer.extend(target, l.space, l.coord);
      entries.emplace_back(static_cast<int>(target), t.coeff);
    }
    block.add(entries, Relation::Equal, 0.0, RowKind::ConstraintMap);
  }
}

/// Facet-product rows for combined facet-multiset numbers in [begin, end).
void facet_product_rows(const BuildContext& ctx, const std::vector<std::vector<std::vector<int>>>& facet_sets,
                        const std::vector<std::int64_t>& strides, std::int64_t begin, std::int64_t end,
                        RowBlock& block) {
  const int m = ctx.indexer.num_spaces();
  Entries entries;
  for (std::int64_t combo = begin; combo < end; ++combo) {
    if (combo == 0) continue;  // the empty product is the constant 1
    std::vector<std::pair<std::int64_t, double>> acc{{0, 1.0}};
    for (int s = 0; s < m; ++s) {
      const auto& sets = facet_sets[static_cast<std::size_t>(s)];
      const auto& chosen = sets[static_cast<std::size_t>((combo / strides[static_cast<std::size_t>(s)]) %
                                                         static_cast<std::int64_t>(sets.size()))];
      const auto part = expand_facet_product(ctx.indexer, s, ctx.problem.spaces[static_cast<std::size_t>(s)], chosen);
      std::vector<std::pair<std::int64_t, double>> next;
      next.reserve(acc.size() * part.size());
      for (const auto& [id, c] : acc) {
        for (const auto& [pid, pc] : part) next.emplace_back(id + pid, c * pc);
      }
      acc = std::move(next);
    }
    entries.clear();
    for (const auto& [id, c] : acc) entries.emplace_back(static_cast<int>(id), c);
    if (detail::implied_by_bounds(entries, ctx.lower)) continue;
    block.add(entries, Relation::GreaterEqual, 0.0, RowKind::Facet);
  }
}

std::vector<std::vector<int>> facet_multisets(int num_facets, int level) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  auto rec = [&](auto&& self) -> void {
    out.push_back(current);
    if (static_cast<int>(current.size()) == level) return;
    const int first = current.empty() ? 0 : current.back();
    for (int f = first; f < num_facets; ++f) {
      current.push_back(f);
      self(self);
      current.pop_back();
    }
  };
  rec(rec);
  return out;
}

template <typename Fn>
void build_blocks(std::int64_t total, std::vector<RowBlock>& blocks, Fn&& fn) {
  const std::int64_t chunks = static_cast<std::int64_t>(blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t begin = total * c / chunks;
    const std::int64_t end = total * (c + 1) / chunks;
    fn(begin, end, blocks[static_cast<std::size_t>(c)]);
  }
}

LinearProgram build(const Problem& problem, const HierarchySpec& spec) {
  detail::check_spec(problem, spec);
  const std::span<const StateSpace> spaces(problem.spaces);
  const MomentIndexer indexer(spec.level, spaces);
  const int m = indexer.num_spaces();

  BuildContext ctx{problem, spec, indexer, {}, {}, {}, {}};
  for (int s = 0; s < m; ++s) {
    ctx.nonneg.push_back(detail::nonnegative_letters(problem.spaces[static_cast<std::size_t>(s)]));
    const auto& letter_ok = ctx.nonneg.back();
    std::vector<bool> flags;
    for (std::int64_t rank = 0; rank < indexer.space_count(s); ++rank) {
      const auto& ms = indexer.multiset(s, rank);
      flags.push_back(std::all_of(ms.begin(), ms.end(),
                                  [&](int c) { return letter_ok[static_cast<std::size_t>(c)]; }));
    }
    ctx.word_nonneg.push_back(std::move(flags));
  }
  for (int r = 0; r < problem.constraint_map.output_dim(); ++r) {
    ctx.map_needs.push_back(detail::slots_needed(problem.constraint_map, r, m));
  }

  LinearProgram lp;
  const std::int64_t total = indexer.size();
  std::vector<std::string> names(static_cast<std::size_t>(total));
  std::vector<double> lower(static_cast<std::size_t>(total)), upper(static_cast<std::size_t>(total));
  std::vector<int> grade(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::int64_t id = 0; id < total; ++id) {
    const MomentIndex index = indexer.index(id);
    names[static_cast<std::size_t>(id)] = canonical_name(index, spaces);
    for (const auto& ms : index.per_space) grade[static_cast<std::size_t>(id)] += static_cast<int>(ms.size());
    const Interval range = id == 0 ? Interval{1.0, 1.0} : detail::word_range(spaces, index);
    lower[static_cast<std::size_t>(id)] = range.lo;
    upper[static_cast<std::size_t>(id)] = range.hi;
  }
  for (std::int64_t id = 0; id < total; ++id) {
    lp.add_variable(std::move(names[static_cast<std::size_t>(id)]), lower[static_cast<std::size_t>(id)],
                    upper[static_cast<std::size_t>(id)], grade[static_cast<std::size_t>(id)]);
  }
  ctx.lower = std::move(lower);

  const bool plus = spec.variant == Variant::Plus;
  const bool extensions = spec.family == ConstraintFamily::FacetExtensions;
  const std::int64_t chunk_count = std::clamp<std::int64_t>(total / 64, 1, 4096);

  {
    std::vector<RowBlock> blocks(static_cast<std::size_t>(chunk_count));
    build_blocks(total, blocks, [&](std::int64_t begin, std::int64_t end, RowBlock& block) {
      Entries entries;
      for (std::int64_t w = begin; w < end; ++w) {
        if (extensions) facet_extension_rows(ctx, w, block, entries);
        if (plus) constraint_map_rows(ctx, w, block, entries);
      }
    });
    for (const auto& b : blocks) lp.append(b);
  }

  if (!extensions) {
    std::vector<std::vector<std::vector<int>>> facet_sets;
    std::vector<std::int64_t> strides(static_cast<std::size_t>(m));
    std::int64_t combos = 1;
    for (int s = 0; s < m; ++s) {
      facet_sets.push_back(facet_multisets(
          static_cast<int>(problem.spaces[static_cast<std::size_t>(s)].facets().size()), spec.level));
    }
    for (int s = m; s-- > 0;) {
      strides[static_cast<std::size_t>(s)] = combos;
      combos *= static_cast<std::int64_t>(facet_sets[static_cast<std::size_t>(s)].size());
    }
    std::vector<RowBlock> blocks(static_cast<std::size_t>(std::clamp<std::int64_t>(combos / 64, 1, 4096)));
    build_blocks(combos, blocks, [&](std::int64_t begin, std::int64_t end, RowBlock& block) {
      facet_product_rows(ctx, facet_sets, strides, begin, end, block);
    });
    for (const auto& b : blocks) lp.append(b);
  }

  if (!plus) {
    const auto& f = problem.constraint_map;
    RowBlock block;
    Entries entries;
    for (const auto& group : detail::polarized_groups(f, spec.pi)) {
      entries.clear();
      for (const auto& [r, r2] : group) {
        for (const auto& t : f.terms(r)) {
          for (const auto& t2 : f.terms(r2)) {
            std::int64_t target = 0;
            for (const auto& l : t.letters) target = indexer.extend(target, l.space, l.coord);
            for (const auto& l : t2.letters) target = indexer.extend(target, l.space, l.coord);
            entries.emplace_back(static_cast<int>(target), t.coeff * t2.coeff);
          }
        }
      }
      block.add(entries, Relation::Equal, 0.0, RowKind::Polarized);
    }
    lp.append(block);
  }

  {
    Entries entries;
    double constant = 0.0;
    for (const auto& t : problem.objective.terms(0)) {
      std::int64_t target = 0;
      for (const auto& l : t.letters) target = indexer.extend(target, l.space, l.coord);
      if (target == 0) {
        constant += t.coeff;
      } else {
        entries.emplace_back(static_cast<int>(target), t.coeff);
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
  }
  return lp;
}

}  // namespace

LinearProgram build_plus_lp(const Problem& problem, const HierarchySpec& spec) {
  HierarchySpec s = spec;
  s.variant = Variant::Plus;
  return build(problem, s);
}

LinearProgram build_polarized_lp(const Problem& problem, const HierarchySpec& spec) {
  HierarchySpec s = spec;
  s.variant = Variant::Polarized;
  return build(problem, s);
}

LinearProgram build_lp(const Problem& problem, const HierarchySpec& spec) { return build(problem, spec); }

std::vector<double> lift_product_point(const Problem& problem, std::span<const PolytopePoint> points, int level) {
  if (points.size() != problem.spaces.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one point per state space");
  }
  for (std::size_t s = 0; s < points.size(); ++s) {
    if (points[s].coordinates.size() != static_cast<std::size_t>(problem.spaces[s].free_dim())) {
      throw Error(ErrorKind::DimensionMismatch, "point " + std::to_string(s) + " has the wrong dimension");
    }
  }
  const MomentIndexer indexer(level, problem.spaces);
  std::vector<double> values(static_cast<std::size_t>(indexer.size()));
  const std::int64_t total = indexer.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t id = 0; id < total; ++id) {
    double v = 1.0;
    for (int s = 0; s < indexer.num_spaces(); ++s) {
      for (int c : indexer.multiset(s, indexer.rank_in(id, s))) {
        v *= points[static_cast<std::size_t>(s)].coordinates[static_cast<std::size_t>(c)];
      }
    }
    values[static_cast<std::size_t>(id)] = v;
  }
  return values;
}

}  // namespace polarize
