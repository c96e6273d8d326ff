#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

#include <gmpxx.h>

namespace calibra {

/// Exact rational scalar. Combinatorial identities are checked in this mode;
/// iterative decompositions use double.
using Rational = mpq_class;

template <typename S>
inline constexpr bool is_rational_scalar_v = std::is_same_v<S, Rational>;

inline double scalar_abs(double x) { return std::abs(x); }
inline Rational scalar_abs(const Rational& x) { return abs(x); }

inline bool scalar_is_zero(double x) { return x == 0.0; }
inline bool scalar_is_zero(const Rational& x) { return x == 0; }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

/// "p/q" (or "p" when q = 1), the wire format for exact coefficients.
inline std::string rational_to_string(const Rational& x) { return x.get_str(); }

inline Rational rational_from_string(const std::string& s) {
    Rational q(s);
    q.canonicalize();
    return q;
}

} // namespace calibra
