#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polarize/lp.hpp"
#include "polarize/moments.hpp"
#include "polarize/state_space.hpp"

namespace polarize {

/// One monomial of a multi-affine map: a coefficient times at most one
/// coordinate letter per state space. No letters means a constant.
struct AffineTerm {
  double coeff = 0.0;
  std::vector<Letter> letters;  // coordinate letters only, sorted by space
};

/// Multi-affine map from the product of the state spaces to R^q, stored
/// as a term list per output coordinate.
class AffineMap {
 public:
  AffineMap() = default;
  explicit AffineMap(int output_dim, std::optional<std::pair<int, int>> shape = std::nullopt);

  /// Adds coeff * prod(letters) to output `output`. Unit letters are
  /// dropped; two letters from one space throw InvalidArgument.
  void add_term(int output, double coeff, std::vector<Letter> letters);

  int output_dim() const { return static_cast<int>(terms_.size()); }
  const std::optional<std::pair<int, int>>& shape() const { return shape_; }
  const std::vector<AffineTerm>& terms(int output) const { return terms_[static_cast<std::size_t>(output)]; }

  /// Merges like terms and drops zero coefficients.
  void simplify();

  /// Value at one point per space.
  std::vector<double> evaluate(std::span<const PolytopePoint> points) const;

  /// Throws UnknownLetter when a term references a space or coordinate
  /// outside `spaces`.
  void check_against(std::span<const StateSpace> spaces) const;

 private:
  std::optional<std::pair<int, int>> shape_;
  std::vector<std::vector<AffineTerm>> terms_;
};

/// Feasibility (or minimization of `objective`) of constraint_map == 0
/// over the product of the state spaces.
struct Problem {
  std::vector<StateSpace> spaces;
  AffineMap constraint_map;
  AffineMap objective{1};

  void validate() const;
};

enum class Variant { Plus, Polarized };
enum class PolarizationKind { Identity, HilbertSchmidt, MatrixProduct };

/// FacetExtensions: every facet times every word that leaves a free slot,
/// restricted to words made of nonnegative coordinates.
/// FacetProducts: every product of at most `level` facets per space.
enum class ConstraintFamily { FacetExtensions, FacetProducts };

struct HierarchySpec {
  int level = 3;
  Variant variant = Variant::Plus;
  PolarizationKind pi = PolarizationKind::Identity;
  ConstraintFamily family = ConstraintFamily::FacetExtensions;
};

std::string_view to_string(Variant v);
std::string_view to_string(PolarizationKind k);
std::string_view to_string(ConstraintFamily f);

/// Level-n relaxation imposing constraint_map on every word with free
/// slots. Variables follow enumerate_indices(level, spaces).
LinearProgram build_plus_lp(const Problem& problem, const HierarchySpec& spec);

/// Level-n relaxation imposing the polarized square of constraint_map on
/// the two-copy marginal. Throws LevelTooLow for level < 2 and
/// ShapeRequired for MatrixProduct without an output shape.
LinearProgram build_polarized_lp(const Problem& problem, const HierarchySpec& spec);

/// Dispatches on spec.variant.
LinearProgram build_lp(const Problem& problem, const HierarchySpec& spec);

/// Moment values of the product state x_1^{(x)n} (x) ... (x) x_m^{(x)n}:
/// entry k belongs to enumerate_indices(level, spaces)[k] and equals the
/// product of the coordinates named by that index (1 for the empty word).
std::vector<double> lift_product_point(const Problem& problem, std::span<const PolytopePoint> points,
                                       int level);

/// Linear map applied to (a (x) a + b (x) b), given a and b.
using PolarizationImage = std::function<std::vector<double>(std::span<const double>, std::span<const double>)>;

/// The image map of a built-in polarization for outputs of size
/// `output_dim`. MatrixProduct needs `shape` (or a square output_dim).
PolarizationImage polarization_image(PolarizationKind kind, int output_dim,
                                     std::optional<std::pair<int, int>> shape = std::nullopt);

/// Samples random nonzero a and pairs (a, b) and checks that the image of
/// a (x) a and of a (x) a + b (x) b is never zero. A sampling test, not a proof.
bool check_pi_soundness(const PolarizationImage& image, int output_dim, int samples, std::uint64_t seed = 1);
bool check_pi_soundness(PolarizationKind kind, int output_dim, int samples, std::uint64_t seed = 1,
                        std::optional<std::pair<int, int>> shape = std::nullopt);

namespace reference {
/// Straightforward single-threaded builder working on MomentIndex values
/// and an ordered map. Produces the same LP, row for row, as build_lp.
LinearProgram build_lp(const Problem& problem, const HierarchySpec& spec);
}  // namespace reference

}  // namespace polarize
