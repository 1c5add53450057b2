#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace qmt {

// All quantities in the library are exact rationals.  Comparisons are exact,
// never tolerance-based.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return numerator(r); }
inline Int den(const Rat& r) { return denominator(r); }

// "p/q" (or "p" when q == 1).  Round-trips through parse_rat.
std::string rat_to_string(const Rat& r);

// Accepts "p", "p/q", optional leading '-'.  Denominator must be nonzero.
std::optional<Rat> parse_rat(std::string_view s);

Rat abs(const Rat& r);

// Smallest integer k with k >= r.
Int rat_ceil(const Rat& r);

// Smallest k >= 0 with 2^k >= n.  Requires n >= 1.  Used as a sound integer
// stand-in for ln(n) in bound formulas (ln n <= log2 n).
long ceil_log2(const Int& n);

}  // namespace qmt
