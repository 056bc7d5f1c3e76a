#pragma once

#include <filesystem>
#include <string_view>

#include "polarize/hierarchy.hpp"
#include "polarize/nmf.hpp"

namespace polarize {

/// Problem file:
///   {"spaces": [{"name", "free_dim", "letters": [...],
///                "facets": [{"constant": c, "coeffs": {"<letter>": v}}]}],
///    "f": {"outputs": q, "shape": [rows, cols] | null,
///          "terms": [[[coeff, {"<space>": "<letter>" | "unit"}], ...], ...]},
///    "p": {"outputs": 1, "terms": [...]}}            ("p" optional)
/// Throws ParseError on malformed input, plus whatever space validation
/// raises.
Problem parse_problem(std::string_view text);
Problem read_problem(const std::filesystem::path& path);

/// Matrix file: {"rows": r, "cols": c, "entries": [row-major values]}.
NonnegMatrix parse_matrix(std::string_view text);
NonnegMatrix read_matrix(const std::filesystem::path& path);

}  // namespace polarize
