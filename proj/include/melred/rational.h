// Exact beat arithmetic.

#ifndef MELRED_RATIONAL_H_
#define MELRED_RATIONAL_H_

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Boost 1.74 compares rational<T> with a plain integer through a template that
// C++20 rewritten comparisons turn into unbounded recursion. Exact-match
// non-template overloads are preferred and sidestep it.
namespace boost {

inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == static_cast<std::int64_t>(b); }
inline bool operator!=(const rational<std::int64_t>& a, std::int64_t b) { return !(a == b); }
inline bool operator!=(const rational<std::int64_t>& a, int b) { return !(a == b); }

}  // namespace boost

namespace melred {

/// Quarter-note beats as an exact fraction. All onsets and durations use this.
using Rational = boost::rational<std::int64_t>;

/// Largest integer not greater than r.
std::int64_t floor_int(const Rational& r);

/// Smallest integer not less than r.
std::int64_t ceil_int(const Rational& r);

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

/// Parses "3", "-1", "3/2" or a finite decimal such as "1.25".
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// "3/2", or "2" when the denominator is one.
std::string to_string(const Rational& r);

}  // namespace melred

#endif  // MELRED_RATIONAL_H_
