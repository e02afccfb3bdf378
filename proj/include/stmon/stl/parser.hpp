#pragma once

#include <map>
#include <string>

#include "stmon/stl/ast.hpp"

namespace stmon::stl {

// Name bindings available to the formula grammar. Variables map to 0-based state
// coordinates; regions are arbitrary pre-built sets.
struct SymbolTable {
  std::map<std::string, int> variables;
  std::map<std::string, geom::Region> regions;
};

// x1..xn plus the conventional aliases x/z -> coordinate 0, y/v -> 1, vx -> 2,
// vy -> 3 (each only when the dimension allows it).
SymbolTable default_symbols(int state_dim);

// Parses the conjunction grammar:
//   spec   := clause ('&&' clause)*
//   clause := 'G' '[a,b]' region | 'F' '[a,b]' region
//           | region 'U' '[a,b]' region | region 'origU' '[a,b]' region
//   region := 'TRUE' | name | var 'in' '[lo,hi]' | linear inequality
//           | '(' region ('&' region | '|' region)* ')'
// F desugars to an until with a trivially-true hold set, origU to a G over [0,a]
// plus the modified until over [a,b]. Sub-formulae are sorted by window start.
// Throws ParseError with 1-based line/column on any syntax or binding problem.
StlSpec parse_spec(const std::string &text, int state_dim, const SymbolTable &symbols);
StlSpec parse_spec(const std::string &text, int state_dim);

// Canonical text form; parse_spec(print_spec(s)) reproduces s exactly.
std::string print_spec(const StlSpec &spec);

// Content digest over the canonical text, dimension and horizon (FNV-1a).
std::uint64_t spec_content_hash(const StlSpec &spec);

// Structural equality (same windows, operators and facet numerics).
bool spec_equal(const StlSpec &a, const StlSpec &b);

}  // namespace stmon::stl
