#include "polarize/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "polarize/error.hpp"

namespace polarize {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  return obj.at(key);
}

StateSpace parse_space(const json& j) {
  const auto name = field(j, "name").get<std::string>();
  const int free_dim = field(j, "free_dim").get<int>();
  const auto letters = field(j, "letters").get<std::vector<std::string>>();
  if (free_dim < 0) throw Error(ErrorKind::ParseError, "space '" + name + "': free_dim must be >= 0");
  std::vector<FacetFunctional> facets;
  for (const auto& f : field(j, "facets")) {
    FacetFunctional g;
    g.constant = f.value("constant", 0.0);
    if (f.contains("coeffs")) {
      for (const auto& [letter, value] : f.at("coeffs").items()) {
        const auto it = std::find(letters.begin(), letters.end(), letter);
        if (it == letters.end()) {
          throw Error(ErrorKind::UnknownLetter, "space '" + name + "' has no letter '" + letter + "'");
        }
        g.coefficients.emplace_back(static_cast<int>(it - letters.begin()), value.get<double>());
      }
    }
    facets.push_back(std::move(g));
  }
  return make_polytope_space(name, free_dim, std::move(facets), letters);
}

AffineMap parse_map(const json& j, const std::vector<StateSpace>& spaces) {
  const int outputs = field(j, "outputs").get<int>();
  std::optional<std::pair<int, int>> shape;
  if (j.contains("shape") && !j.at("shape").is_null()) {
    const auto s = j.at("shape").get<std::vector<int>>();
    if (s.size() != 2) throw Error(ErrorKind::ParseError, "shape must be [rows, cols]");
    shape = std::make_pair(s[0], s[1]);
  }
  AffineMap map(outputs, shape);
  const json& terms = field(j, "terms");
  if (!terms.is_array() || static_cast<int>(terms.size()) != outputs) {
    throw Error(ErrorKind::ParseError, "terms must list one array per output");
  }
  for (int r = 0; r < outputs; ++r) {
    for (const auto& t : terms[static_cast<std::size_t>(r)]) {
      if (!t.is_array() || t.size() != 2) throw Error(ErrorKind::ParseError, "a term is [coeff, {space: letter}]");
      std::vector<Letter> letters;
      for (const auto& [space_name, letter] : t[1].items()) {
        int s = -1;
        for (std::size_t k = 0; k < spaces.size(); ++k) {
          if (spaces[k].name() == space_name) s = static_cast<int>(k);
        }
        if (s < 0) throw Error(ErrorKind::UnknownLetter, "no space named '" + space_name + "'");
        const auto l = letter.get<std::string>();
        if (l == "unit") continue;
        const auto c = spaces[static_cast<std::size_t>(s)].find_letter(l);
        if (!c) throw Error(ErrorKind::UnknownLetter, "space '" + space_name + "' has no letter '" + l + "'");
        letters.push_back(Letter::coordinate(s, *c));
      }
      map.add_term(r, t[0].get<double>(), std::move(letters));
    }
  }
  return map;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
auto parsing(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace

Problem parse_problem(std::string_view text) {
  return parsing([&] {
    const json j = json::parse(text);
    Problem p;
    for (const auto& s : field(j, "spaces")) p.spaces.push_back(parse_space(s));
    p.constraint_map = parse_map(field(j, "f"), p.spaces);
    if (j.contains("p")) p.objective = parse_map(j.at("p"), p.spaces);
    p.validate();
    return p;
  });
}

Problem read_problem(const std::filesystem::path& path) { return parse_problem(slurp(path)); }

NonnegMatrix parse_matrix(std::string_view text) {
  return parsing([&] {
    const json j = json::parse(text);
    return NonnegMatrix::from(field(j, "rows").get<int>(), field(j, "cols").get<int>(),
                              field(j, "entries").get<std::vector<double>>());
  });
}

NonnegMatrix read_matrix(const std::filesystem::path& path) { return parse_matrix(slurp(path)); }

}  // namespace polarize
