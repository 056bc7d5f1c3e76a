#include <algorithm>
#include <map>

#include "polarize/error.hpp"
#include "polarize/hierarchy.hpp"

namespace polarize {

AffineMap::AffineMap(int output_dim, std::optional<std::pair<int, int>> shape) : shape_(shape) {
  if (output_dim < 0) throw Error(ErrorKind::InvalidArgument, "output_dim must be nonnegative");
  if (shape && shape->first * shape->second != output_dim) {
    throw Error(ErrorKind::InvalidShape, "output shape does not match output_dim");
  }
  terms_.resize(static_cast<std::size_t>(output_dim));
}

void AffineMap::add_term(int output, double coeff, std::vector<Letter> letters) {
  if (output < 0 || output >= output_dim()) {
    throw Error(ErrorKind::InvalidArgument, "output " + std::to_string(output) + " out of range");
  }
  std::erase_if(letters, [](const Letter& l) { return l.is_unit(); });
  std::sort(letters.begin(), letters.end());
  for (std::size_t k = 1; k < letters.size(); ++k) {
    if (letters[k].space == letters[k - 1].space) {
      throw Error(ErrorKind::InvalidArgument, "term uses space " + std::to_string(letters[k].space) +
                                                  " twice; maps must be affine in each space");
    }
  }
  terms_[static_cast<std::size_t>(output)].push_back(AffineTerm{coeff, std::move(letters)});
}

void AffineMap::simplify() {
  for (auto& list : terms_) {
    std::map<std::vector<Letter>, double> merged;
    std::vector<std::vector<Letter>> order;
    for (const auto& t : list) {
      auto [it, inserted] = merged.try_emplace(t.letters, 0.0);
      if (inserted) order.push_back(t.letters);
      it->second += t.coeff;
    }
    list.clear();
    for (auto& letters : order) {
      const double c = merged[letters];
      if (c != 0.0) list.push_back(AffineTerm{c, std::move(letters)});
    }
  }
}

std::vector<double> AffineMap::evaluate(std::span<const PolytopePoint> points) const {
  std::vector<double> out(terms_.size(), 0.0);
  for (std::size_t r = 0; r < terms_.size(); ++r) {
    for (const auto& t : terms_[r]) {
      double v = t.coeff;
      for (const auto& l : t.letters) {
        if (l.space < 0 || static_cast<std::size_t>(l.space) >= points.size()) {
          throw Error(ErrorKind::DimensionMismatch, "no point given for space " + std::to_string(l.space));
        }
        const auto& x = points[static_cast<std::size_t>(l.space)].coordinates;
        if (static_cast<std::size_t>(l.coord) >= x.size()) {
          throw Error(ErrorKind::DimensionMismatch, "point too short for coordinate " + std::to_string(l.coord));
        }
        v *= x[static_cast<std::size_t>(l.coord)];
      }
      out[r] += v;
    }
  }
  return out;
}

void AffineMap::check_against(std::span<const StateSpace> spaces) const {
  for (const auto& list : terms_) {
    for (const auto& t : list) {
      for (const auto& l : t.letters) {
        if (l.space < 0 || l.space >= static_cast<int>(spaces.size()) ||
            l.coord >= spaces[static_cast<std::size_t>(l.space)].free_dim()) {
          throw Error(ErrorKind::UnknownLetter, "map term references space " + std::to_string(l.space) +
                                                    ", coordinate " + std::to_string(l.coord));
        }
      }
    }
  }
}

void Problem::validate() const {
  if (spaces.empty()) throw Error(ErrorKind::InvalidArgument, "problem has no state spaces");
  constraint_map.check_against(spaces);
  objective.check_against(spaces);
  if (objective.output_dim() != 1) {
    throw Error(ErrorKind::InvalidArgument, "objective must have exactly one output");
  }
}

std::string_view to_string(Variant v) {
  return v == Variant::Plus ? "plus" : "polarized";
}

std::string_view to_string(PolarizationKind k) {
  switch (k) {
    case PolarizationKind::Identity: return "id";
    case PolarizationKind::HilbertSchmidt: return "hs";
    case PolarizationKind::MatrixProduct: return "matrix";
  }
  return "id";
}

std::string_view to_string(ConstraintFamily f) {
  return f == ConstraintFamily::FacetExtensions ? "lite" : "full";
}

}  // namespace polarize
