#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rroa/poly/polynomial.h"

namespace rroa {
namespace poly {

/// Parse failure; `column` is 1-based within the parsed text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int column)
      : std::runtime_error(what), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

/// Parses polynomial text such as `-0.5*x1^2*x2 + 1.0*x3` or
/// `x1*(0.5 + (0.5 + d1)*x1)`. Grammar: sums/differences of products of
/// factors; a factor is a decimal or scientific number, a variable name from
/// `names`, a parenthesised expression, or a factor raised to a
/// non-negative integer power with `^`. Unary minus is allowed. Whitespace
/// is insignificant.
Polynomial ParsePolynomial(std::string_view text,
                           const std::vector<std::string>& names);

}  // namespace poly
}  // namespace rroa
